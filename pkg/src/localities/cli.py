"""Command-line front end."""
from __future__ import annotations

import argparse
import json
import multiprocessing
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .fileio import FormatError, load, save
from .locality import Locality, LocalityError, s_table_failure, verify_locality, verify_objectivity
from .normal_quotient import (PartialNormalSubgroup, all_partial_normal_subgroups, first_isomorphism,
                              normal_closure, quotient, subgroup_correspondence, theta_quotient,
                              verify_normal_theory, verify_quotient)
from .partial_group import PartialGroupError, verify_partial_group
from .products import disjointness_criterion, verify_product
from .report import FAIL, PASS, SKIP, HypothesisError, Report

SUITES = ("axioms", "locality", "normal", "quotient", "products")
BOUND_4_LIMIT = 72


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    input: str
    bound: int = 3
    suite: str = "all"
    normal: str = "all"
    json: bool = False
    workers: int = 1

    def validate(self) -> None:
        if self.bound < 2:
            raise ConfigError("bound must be at least 2")
        if self.bound > 4:
            raise ConfigError("bound above 4 is not supported")
        if self.suite != "all" and self.suite not in SUITES:
            raise ConfigError(f"unknown suite {self.suite!r}")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")

    @property
    def suites(self) -> tuple:
        return SUITES if self.suite == "all" else (self.suite,)


@dataclass
class SuiteReport:
    instance: dict
    config: dict
    sections: list[Report] = field(default_factory=list)
    timing: dict = field(default_factory=dict)

    def counts(self) -> dict:
        c = {PASS: 0, FAIL: 0, SKIP: 0}
        for s in self.sections:
            for chk in s.checks:
                c[chk.status] += 1
        return c

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.sections)

    def text(self, timing: bool = True) -> str:
        out = [f"# {k}: {v}" for k, v in self.instance.items()]
        out += [f"# {k}: {v}" for k, v in self.config.items()]
        for s in self.sections:
            out.append("")
            out.append(s.text())
        c = self.counts()
        out.append("")
        out.append(f"# summary: PASS={c[PASS]} FAIL={c[FAIL]} SKIP={c[SKIP]}")
        if timing:
            out.append("# ---- timing (varies between runs) ----")
            out += [f"# {k}: {v:.3f}s" for k, v in self.timing.items()]
            out.append("# ---- end timing ----")
        return "\n".join(out) + "\n"

    def as_dict(self, timing: bool = True) -> dict:
        d = {"instance": self.instance, "config": self.config,
             "sections": [s.as_dict() for s in self.sections], "summary": self.counts()}
        if timing:
            d["timing"] = {k: round(v, 3) for k, v in self.timing.items()}
        return d

    def json(self, timing: bool = True) -> str:
        return json.dumps(self.as_dict(timing), indent=2) + "\n"


# -- normal subgroup selection ---------------------------------------------------------

def parse_normal_spec(loc: Locality, spec: str) -> list[PartialNormalSubgroup]:
    """``all`` or ``gen:<i>,<j>,...`` (normal closure of the listed elements)."""
    if spec == "all":
        return all_partial_normal_subgroups(loc)
    if spec.startswith("gen:"):
        body = spec[4:].replace(",", " ").split()
        try:
            gens = [int(t) for t in body]
        except ValueError:
            raise ConfigError(f"bad element list in {spec!r}") from None
        bad = [g for g in gens if not 0 <= g < loc.n]
        if bad:
            raise ConfigError(f"element {bad[0]} out of range 0..{loc.n - 1}")
        return [normal_closure(loc, gens)]
    raise ConfigError(f"normal subgroup spec must be 'all' or 'gen:<indices>', got {spec!r}")


# -- work units ---------------------------------------------------------------------------

# state shared with forked workers
_STATE: dict = {}


def _section(title: str, rep: Report) -> Report:
    rep.title = title
    return rep


def _skip(title: str, cid: str, note: str) -> Report:
    rep = Report(title)
    rep.skip(cid, note=note)
    return rep


def _run_unit(unit):
    obj, normals, bound = _STATE["obj"], _STATE["normals"], _STATE["bound"]
    kind, arg = unit
    t0 = time.perf_counter()
    if kind == "axioms":
        pg = obj.pg if isinstance(obj, Locality) else obj
        rep = _section("axioms", verify_partial_group(pg, bound))
    elif kind == "objectivity":
        rep = _section("objectivity", verify_objectivity(obj, bound))
    elif kind == "locality":
        rep = _section("locality", verify_locality(obj))
    elif kind == "normal":
        N = normals[arg]
        rep = _section(f"normal N{arg} |N|={len(N)}", verify_normal_theory(obj, N, bound))
    elif kind == "quotient":
        N = normals[arg]
        rep = _section(f"quotient N{arg} |N|={len(N)}", verify_quotient(obj, N))
    elif kind == "correspondence":
        N = normals[arg]
        rep = _section(f"correspondence N{arg} |N|={len(N)}", subgroup_correspondence(obj, N))
    elif kind == "isomorphism":
        i, j = arg
        _, beta = quotient(obj, normals[j])
        _, rep = first_isomorphism(beta, normals[i])
        rep = _section(f"first isomorphism N{i} <= N{j}", rep)
    elif kind == "theta":
        try:
            rep = _section("theta", theta_quotient(obj).report)
        except HypothesisError as exc:
            rep = _skip("theta", "theta.hypothesis", exc.clause)
    elif kind == "product":
        i, j = arg
        rep = verify_product(obj, normals[i], normals[j])
        rep.extend(disjointness_criterion(obj, normals[i], normals[j]))
        rep = _section(f"product N{i} N{j}", rep)
    else:  # pragma: no cover
        raise ValueError(kind)
    return rep, time.perf_counter() - t0


def _units(cfg: RunConfig, skip_note: str | None, normals) -> list:
    """Work units in output order; ``skip_note`` set means only axioms (and the
    locality suite, for a locality) can run."""
    units = []
    k = len(normals)
    for suite in cfg.suites:
        if suite == "axioms":
            units.append(("axioms", None))
        elif suite == "locality" and skip_note != "not-a-locality":
            units += [("objectivity", None), ("locality", None)]
        elif skip_note:
            units.append(("skip", (suite, skip_note)))
        elif suite == "normal":
            units += [("normal", i) for i in range(k)]
        elif suite == "quotient":
            units += [("quotient", i) for i in range(k)]
            units += [("correspondence", i) for i in range(k)]
            units += [("isomorphism", (i, j)) for j in range(k) for i in range(k)
                      if normals[i].members <= normals[j].members]
            units.append(("theta", None))
        elif suite == "products":
            units += [("product", (i, j)) for i in range(k) for j in range(i + 1, k)]
    return units


def instance_meta(obj) -> dict:
    if isinstance(obj, Locality):
        return {"instance": obj.name or "(unnamed)", **obj.summary()}
    return {"instance": obj.name or "(unnamed)", "|L|": obj.n, "kind": "partial group"}


def run_suite(cfg: RunConfig, obj=None) -> SuiteReport:
    """Load the input (unless given) and run the selected verifiers in a fixed order."""
    cfg.validate()
    if obj is None:
        obj = load(cfg.input)
    is_loc = isinstance(obj, Locality)
    skip_note = None
    if not is_loc:
        skip_note = "not-a-locality"
    elif s_table_failure(obj) is not None:
        skip_note = "S-is-not-a-group"
    if cfg.bound == 4 and obj.n > BOUND_4_LIMIT:
        raise ConfigError(f"bound 4 needs |L| <= {BOUND_4_LIMIT}; this instance has {obj.n}")
    normals = []
    if skip_note is None and set(cfg.suites) & {"normal", "quotient", "products"}:
        try:
            normals = parse_normal_spec(obj, cfg.normal)
        except LocalityError as exc:
            raise ConfigError(str(exc)) from None
    result = SuiteReport(instance_meta(obj),
                         {"suite": cfg.suite, "bound": cfg.bound, "normal": cfg.normal})
    if normals:
        result.instance["partial-normal-subgroups"] = " ".join(
            f"N{i}:{len(N)}" for i, N in enumerate(normals))
    units = _units(cfg, skip_note, normals)
    work = [u for u in units if u[0] != "skip"]
    _STATE.update(obj=obj, normals=normals, bound=cfg.bound)
    t0 = time.perf_counter()
    if cfg.workers > 1 and len(work) > 1:
        ctx = multiprocessing.get_context("fork")
        with ProcessPoolExecutor(cfg.workers, mp_context=ctx) as pool:
            done = list(pool.map(_run_unit, work))
    else:
        done = [_run_unit(u) for u in work]
    it = iter(done)
    for kind, arg in units:
        if kind == "skip":
            suite, note = arg
            result.sections.append(_skip(suite, f"{suite}.suite", note))
            continue
        rep, dt = next(it)
        result.sections.append(rep)
        result.timing[rep.title] = dt
    result.timing["total"] = time.perf_counter() - t0
    return result


# -- subcommands ----------------------------------------------------------------------------

def _emit(result: SuiteReport, as_json: bool) -> int:
    sys.stdout.write(result.json() if as_json else result.text())
    return 0 if result.ok else 1


def _need_locality(obj) -> Locality:
    if not isinstance(obj, Locality):
        raise ConfigError("this command needs a locality, not a bare partial group")
    return obj


def cmd_build(args) -> int:
    obj = load(args.input)
    save(obj, args.output)
    print(" ".join(f"{k}={v}" for k, v in instance_meta(obj).items()))
    return 0


def cmd_verify(args) -> int:
    cfg = RunConfig(args.input, bound=args.bound, suite=args.suite, normal=args.normal,
                    json=args.json, workers=args.workers)
    return _emit(run_suite(cfg), args.json)


def cmd_report(args) -> int:
    cfg = RunConfig(args.input, bound=args.bound, suite="all", json=args.json, workers=args.workers)
    return _emit(run_suite(cfg), args.json)


def cmd_normals(args) -> int:
    loc = _need_locality(load(args.input))
    try:
        normals = all_partial_normal_subgroups(loc)
    except LocalityError as exc:
        raise ConfigError(str(exc)) from None
    for i, N in enumerate(normals):
        print(f"N{i} size={len(N)} S-part={len(N.T)} cosets={len(N.cosets.blocks)} "
              f"members={','.join(map(str, N.sorted))}")
    return 0


def cmd_quotient(args) -> int:
    loc = _need_locality(load(args.input))
    normals = parse_normal_spec(loc, args.normal)
    if args.output and len(normals) != 1:
        raise ConfigError("-o needs a single normal subgroup (use gen:...)")
    result = SuiteReport(instance_meta(loc), {"normal": args.normal})
    for i, N in enumerate(normals):
        q, rho = quotient(loc, N)
        rep = verify_quotient(loc, N)
        rep.title = f"quotient N{i} |N|={len(N)}"
        rep.meta["blocks"] = " ".join(
            "{" + ",".join(map(str, sorted(B))) + "}" for B in N.cosets.blocks)
        result.sections.append(rep)
        if args.output:
            save(q, args.output)
    return _emit(result, args.json)


def cmd_product(args) -> int:
    loc = _need_locality(load(args.input))
    M, N = parse_normal_spec(loc, args.m), parse_normal_spec(loc, args.n)
    if len(M) != 1 or len(N) != 1:
        raise ConfigError("--m and --n each need a single normal subgroup (use gen:...)")
    rep = verify_product(loc, M[0], N[0])
    rep.extend(disjointness_criterion(loc, M[0], N[0]))
    rep.title = "product"
    result = SuiteReport(instance_meta(loc), {"m": args.m, "n": args.n}, [rep])
    return _emit(result, args.json)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="localities",
                                 description="Build and verify partial groups and localities.")
    sub = ap.add_subparsers(dest="command", required=True)
    inp = "file in explicit or description format, or example:<name>"

    p = sub.add_parser("build", help="materialize an input and write the explicit format")
    p.add_argument("input", help=inp)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("input", help=inp)
    p.add_argument("--suite", default="all", choices=SUITES + ("all",))
    p.add_argument("--bound", type=int, default=3, help="word length bound (2..4; 4 needs |L| <= 72)")
    p.add_argument("--normal", default="all", help="'all' or gen:<indices>")
    p.add_argument("--json", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("quotient", help="quotient by a partial normal subgroup")
    p.add_argument("input", help=inp)
    p.add_argument("--normal", required=True, help="'all' or gen:<indices>")
    p.add_argument("-o", "--output", help="write the quotient locality here")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_quotient)

    p = sub.add_parser("normals", help="list all partial normal subgroups")
    p.add_argument("input", help=inp)
    p.set_defaults(func=cmd_normals)

    p = sub.add_parser("product", help="check the product of two partial normal subgroups")
    p.add_argument("input", help=inp)
    p.add_argument("--m", required=True, help="gen:<indices>")
    p.add_argument("--n", required=True, help="gen:<indices>")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_product)

    p = sub.add_parser("report", help="all suites with instance metadata")
    p.add_argument("input", help=inp)
    p.add_argument("--json", action="store_true")
    p.add_argument("--bound", type=int, default=3)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FormatError, ConfigError, LocalityError, PartialGroupError, HypothesisError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
