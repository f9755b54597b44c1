"""Reading and writing partial groups and localities.

Two input formats are understood. The explicit format lists the tables::

    partialgroup n=3
    name free1
    label 1 a
    identity 0
    inv 0 0
    pair 0 1 1
    oracle free1

with ``oracle full``, ``oracle free1``, ``oracle delta`` (followed by a
``delta`` section giving ``prime``, ``S``, ``object`` and ``sg`` lines) or
``oracle table maxlen=<k>`` (followed by ``word`` lines). The description
format builds a locality from a permutation group::

    group
    (1 2 3)
    (1 2)
    end
    prime p=3
    sylow auto
    delta seed
    (1 2 3)
    end

``delta all-nonidentity`` may replace the seed block, and ``sylow`` may list
generators instead of ``auto``. ``#`` starts a comment in both formats.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .automaton import trivial_automaton
from .group_core import GroupError, _closure, generate_group, parse_perm, parse_perm_list, sylow_subgroup
from .locality import (Locality, LocalityError, delta_closure, locality_from_group,
                       locality_from_tables, nonidentity_subgroups)
from .partial_group import PartialGroupError, PartialGroupView, free_one_generator, table_view

EXAMPLE_PREFIX = "example:"


class FormatError(ValueError):
    """Unparseable or invalid input; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None, source: str = ""):
        where = f"{source}:" if source else ""
        where += f"line {line}: " if line is not None else (" " if where else "")
        super().__init__(f"{where}{message}")
        self.line = line


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


def _ints(tokens, no, source=""):
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise FormatError(f"expected integers, got {' '.join(tokens)!r}", no, source) from None


# -- explicit format ------------------------------------------------------------

def dumps(obj) -> str:
    """Serialize a PartialGroupView or Locality. Localities always use ``oracle delta``."""
    loc = obj if isinstance(obj, Locality) else None
    pg = loc.pg if loc is not None else obj
    if loc is None and pg.oracle_name not in ("full", "free1", "table"):
        raise ValueError(f"oracle {pg.oracle_name!r} of {pg.name!r} has no file representation")
    n = pg.n
    out = [f"partialgroup n={n}"]
    name = loc.name if loc is not None else pg.name
    if name:
        out.append(f"name {name}")
    if pg.labels:
        out.extend(f"label {g} {pg.labels[g]}" for g in range(n))
    out.append(f"identity {pg.identity}")
    out.extend(f"inv {g} {pg.inv[g]}" for g in range(n))
    for f, g in zip(*np.nonzero(pg.pair >= 0)):
        out.append(f"pair {f} {g} {pg.pair[f, g]}")
    if loc is not None:
        out.append("oracle delta")
        out.append("delta")
        out.append(f"prime {loc.p}")
        out.append("S " + " ".join(map(str, loc.s_sorted)))
        out.extend("object " + " ".join(map(str, sorted(X))) for X in loc.delta)
        out.extend(f"sg {g} " + " ".join(map(str, sorted(loc.sg[g]))) for g in range(n))
    elif pg.oracle_name == "table":
        out.append(f"oracle table maxlen={pg.table_maxlen}")
        out.extend("word " + " ".join(map(str, w)) for w in pg.table_words if len(w) >= 2)
    else:
        out.append(f"oracle {pg.oracle_name}")
    return "\n".join(out) + "\n"


def save(obj, path) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def _parse_explicit(text: str, source: str = ""):
    def err(msg, no=None):
        return FormatError(msg, no, source)

    lines = list(_lines(text))
    if not lines or not lines[0][1].startswith("partialgroup"):
        raise err("missing 'partialgroup n=<count>' header", lines[0][0] if lines else None)
    no, head = lines[0]
    tok = head.split()
    if len(tok) != 2 or not tok[1].startswith("n="):
        raise err("header must read 'partialgroup n=<count>'", no)
    n = _ints([tok[1][2:]], no, source)[0]
    if n < 1:
        raise err("n must be positive", no)

    def elem(t, no):
        g = _ints([t], no, source)[0]
        if not 0 <= g < n:
            raise err(f"element {g} out of range 0..{n - 1}", no)
        return g

    name, labels, identity = "", {}, None
    inv = [None] * n
    pair = np.full((n, n), -1, dtype=np.int64)
    oracle = maxlen = None
    words, objects, sg = [], [], {}
    prime = S = None
    in_delta = False
    for no, line in lines[1:]:
        kw, _, rest = line.partition(" ")
        args = rest.split()
        if kw == "name":
            name = rest.strip()
        elif kw == "label":
            parts = rest.split(maxsplit=1)
            if len(parts) != 2:
                raise err("label needs an element and a text", no)
            labels[elem(parts[0], no)] = parts[1]
        elif kw == "identity":
            if len(args) != 1:
                raise err("identity takes one element", no)
            identity = elem(args[0], no)
        elif kw == "inv":
            if len(args) != 2:
                raise err("inv takes two elements", no)
            g, h = (elem(t, no) for t in args)
            if inv[g] is not None and inv[g] != h:
                raise err(f"conflicting inverse for {g}", no)
            inv[g] = h
        elif kw == "pair":
            if len(args) != 3:
                raise err("pair takes three elements", no)
            f, g, h = (elem(t, no) for t in args)
            if pair[f, g] >= 0 and pair[f, g] != h:
                raise err(f"conflicting product for ({f}, {g})", no)
            pair[f, g] = h
        elif kw == "oracle":
            if oracle is not None:
                raise err("oracle given twice", no)
            if not args or args[0] not in ("full", "free1", "delta", "table"):
                raise err("oracle must be one of full, free1, delta, table", no)
            oracle = args[0]
            if oracle == "table":
                if len(args) != 2 or not args[1].startswith("maxlen="):
                    raise err("table oracle needs maxlen=<k>", no)
                maxlen = _ints([args[1][7:]], no, source)[0]
            elif len(args) != 1:
                raise err(f"unexpected arguments after oracle {oracle}", no)
        elif kw == "word":
            if oracle != "table":
                raise err("word lines need 'oracle table' first", no)
            w = tuple(elem(t, no) for t in args)
            if len(w) > maxlen:
                raise err(f"word longer than maxlen={maxlen}", no)
            words.append(w)
        elif kw == "delta":
            if oracle != "delta":
                raise err("delta section needs 'oracle delta' first", no)
            in_delta = True
        elif kw in ("prime", "S", "object", "sg"):
            if not in_delta:
                raise err(f"{kw} outside the delta section", no)
            if kw == "prime":
                prime = _ints(args, no, source)
                if len(prime) != 1:
                    raise err("prime takes one integer", no)
                prime = prime[0]
            elif kw == "S":
                S = [elem(t, no) for t in args]
            elif kw == "object":
                objects.append([elem(t, no) for t in args])
            else:
                if not args:
                    raise err("sg needs an element", no)
                g = elem(args[0], no)
                if g in sg:
                    raise err(f"sg given twice for {g}", no)
                sg[g] = [elem(t, no) for t in args[1:]]
        else:
            raise err(f"unknown keyword {kw!r}", no)

    if identity is None:
        raise err("no identity line")
    missing = [g for g in range(n) if inv[g] is None]
    if missing:
        raise err(f"no inverse given for element {missing[0]}")
    if oracle is None:
        raise err("no oracle line")
    lab = [labels.get(g, str(g)) for g in range(n)] if labels else None
    try:
        if oracle == "delta":
            if prime is None or S is None:
                raise err("delta section needs prime and S lines")
            if len(sg) != n:
                raise err(f"no sg line for element {min(set(range(n)) - set(sg))}")
            return locality_from_tables(n, identity, inv, pair, S, objects,
                                        [sg[g] for g in range(n)], prime, labels=lab, name=name)
        if oracle == "table":
            return table_view(n, identity, inv, pair, words, maxlen, labels=lab, name=name)
        if oracle == "full":
            return PartialGroupView(n, identity, inv, pair, automaton=trivial_automaton(n),
                                    labels=lab, name=name, oracle_name="full")
        free = free_one_generator()
        if (n, identity, inv) != (free.n, free.identity, free.inv) or not np.array_equal(pair, free.pair):
            raise err("tables do not match the free1 oracle")
        return free
    except (PartialGroupError, LocalityError) as exc:
        raise err(f"validation failed: {exc}") from exc


# -- description format -----------------------------------------------------------

def _parse_description(text: str, source: str = "") -> Locality:
    def err(msg, no=None):
        return FormatError(msg, no, source)

    gens, seeds = [], []
    prime = sylow = None
    all_nonidentity = False
    name = ""
    block = None
    block_start = None
    for no, line in _lines(text):
        if block is not None:
            if line == "end":
                block = None
                continue
            try:
                if block == "group":
                    gens.append((parse_perm(line), no))
                else:
                    seeds.append((parse_perm_list(line), no))
            except GroupError as exc:
                raise err(str(exc), no) from None
            continue
        kw, _, rest = line.partition(" ")
        rest = rest.strip()
        if kw == "group" and not rest:
            block, block_start = "group", no
        elif kw == "name":
            name = rest
        elif kw == "prime":
            if not rest.startswith("p="):
                raise err("prime line must read 'prime p=<p>'", no)
            prime = _ints([rest[2:]], no, source)[0]
        elif kw == "sylow":
            if rest == "auto":
                sylow = "auto"
            else:
                try:
                    sylow = (parse_perm_list(rest), no)
                except GroupError as exc:
                    raise err(str(exc), no) from None
        elif kw == "delta":
            if rest == "seed":
                block, block_start = "seed", no
            elif rest == "all-nonidentity":
                all_nonidentity = True
            else:
                raise err("delta must be followed by 'seed' or 'all-nonidentity'", no)
        else:
            raise err(f"unknown keyword {kw!r}", no)
    if block is not None:
        raise err(f"{block} block not closed by 'end'", block_start)
    if not gens:
        raise err("no group generators")
    if prime is None:
        raise err("no 'prime p=<p>' line")
    if sylow is None:
        raise err("no sylow line")
    if all_nonidentity and seeds:
        raise err("give either a seed block or all-nonidentity, not both")
    deg = max(len(g) for g, _ in gens)
    try:
        G = generate_group([g for g, _ in gens])
    except GroupError as exc:
        raise err(str(exc), gens[0][1]) from None
    index = {perm: i for i, perm in enumerate(G.perms)}

    def members(perms, no):
        idx = []
        for perm in perms:
            if len(perm) > deg:
                raise err("generator moves a point outside the group's degree", no)
            perm = perm + tuple(range(len(perm), deg))
            if perm not in index:
                raise err("generator is not in the group", no)
            idx.append(index[perm])
        return _closure(G, idx)

    if sylow == "auto":
        S = sylow_subgroup(G, prime).members
    else:
        S = members(*sylow)
    if all_nonidentity:
        seed = nonidentity_subgroups(G, S)
    else:
        seed = []
        for perms, no in seeds:
            X = members(perms, no)
            if not X <= S:
                raise err("seed subgroup is not contained in S", no)
            seed.append(X)
    try:
        delta = delta_closure(G, S, seed, prime)
        return locality_from_group(G, S, delta, prime, name=name)
    except LocalityError as exc:
        raise err(f"validation failed: {exc}") from exc


def loads(text: str, source: str = ""):
    first = next(_lines(text), (None, ""))[1]
    if first.startswith("partialgroup"):
        return _parse_explicit(text, source)
    return _parse_description(text, source)


def load(source: str):
    """An ``example:<name>`` instance, or the contents of a file in either format."""
    if source.startswith(EXAMPLE_PREFIX):
        from .zoo import load_example
        try:
            return load_example(source[len(EXAMPLE_PREFIX):])
        except KeyError as exc:
            raise FormatError(exc.args[0]) from None
    try:
        text = Path(source).read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read {source}: {exc.strerror}") from None
    return loads(text, source)
