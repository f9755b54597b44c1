"""Acceptance criteria 1-10, one printed PASS/FAIL line each.

    pytest tests/test_acceptance.py -s -q
    python3 tests/test_acceptance.py
"""
import itertools
import os
import random
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from localities.group_core import named_example
from localities.locality import (Locality, LocalityError, fusion_maps, is_subgroup_qstar,
                                 is_subgroup_words, locality_from_group, op_subgroup,
                                 verify_locality, verify_objectivity)
from localities.normal_quotient import (PartialNormalSubgroup, all_partial_normal_subgroups,
                                        first_isomorphism, frattini_decompose, is_partial_normal,
                                        is_up_maximal, maximal_cosets, quotient, theta_quotient,
                                        verify_quotient)
from localities.partial_group import (PartialGroupError, PartialGroupView, binary_closure,
                                      verify_partial_group, word_closure)
from localities.products import normalization_failure, product_set, verify_product
from localities.zoo import ZOO, example_subsets, load_example

import oracles

LOCALITIES = [name for name in ZOO if name != "free1"]
MUTATIONS = 50
MUTATION_SEED = 20240601


def line(n, ok, detail):
    text = f"CRITERION {n} {'PASS' if ok else 'FAIL'} {detail}"
    print(text)
    return ok, text


def has_witness(check):
    return check.witness not in (None, "none-recorded")


# -- 1. S3 at p = 3 with the Sylow 3-subgroup as the only object ------------------------------

def criterion_1():
    G, S, _ = named_example("S3")
    loc = locality_from_group(G, S, [S.members], 3)
    full = all(loc.pg.accepted(k).all() for k in range(5))
    bl = oracles.brute("S3", "sylow")
    brute_full = all(bl.in_domain(w) for k in range(5) for w in itertools.product(bl.L, repeat=k))
    ok = loc.n == 6 and full and brute_full
    return line(1, ok, f"|L|={loc.n} D=W(L)-to-length-4={full} brute={brute_full}")


# -- 2. O4+(2) with every nonidentity subgroup of S as an object ---------------------------------

def criterion_2():
    G, S, _ = named_example("O4plus2")
    loc = load_example("O4plus2:all")
    whole = sorted(loc.embed) == list(range(G.n))
    acc = loc.pg.accepted(2).reshape(loc.n, loc.n)
    rejected = [(int(f), int(g)) for f, g in zip(*(~acc).nonzero())]
    bl = oracles.brute("O4plus2", "all")
    perm = oracles.element_map(loc, bl)
    w = rejected[0] if rejected else None
    confirmed = w is not None and not bl.in_domain((perm[w[0]], perm[w[1]]))
    ok = loc.n == 72 and whole and confirmed
    return line(2, ok, f"|L|={loc.n} L=G={whole} rejected-length-2={len(rejected)} witness={w}")


# -- 3. GL3(2) with parabolic objects, then with all objects ------------------------------------

def criterion_3():
    bl = oracles.brute("GL3_2", "parabolic")
    M1, M2 = bl.meta["M1"], bl.meta["M2"]
    par = load_example("GL3_2:parabolic")
    L_par = frozenset(oracles.element_map(par, bl))
    union = L_par == M1 | M2
    full = load_example("GL3_2:all")
    L_all = frozenset(oracles.element_map(full, oracles.brute("GL3_2", "all")))
    prods = {oracles.mul(a, b) for a in M1 for b in M2} | {oracles.mul(b, a) for a in M1 for b in M2}
    ok = union and par.n == 40 and L_all == prods
    return line(3, ok, f"parabolic:L=M1uM2={union} |L|={par.n} all:L=M1M2uM2M1={L_all == prods} "
                       f"|L|={full.n}(recorded)")


# -- 4. verifiers on the zoo, then seeded mutations ------------------------------------------------

def mutant(rng, names):
    """One seeded mutation: ('pair', ...) redirects a defined product, ('delta', ...) drops an object."""
    name = rng.choice(names)
    loc = load_example(name)
    pg = loc.pg
    if rng.random() < 0.5:
        defined = sorted(zip(*(pg.pair >= 0).nonzero()))
        f, g = (int(t) for t in rng.choice(defined))
        old = int(pg.pair[f, g])
        h = rng.choice([x for x in range(pg.n) if x != old])
        pair = pg.pair.copy()
        pair[f, g] = h
        bad = PartialGroupView(pg.n, pg.identity, pg.inv, pair, automaton=pg.automaton, name=name)
        return ("pair", name, (f, g, old, h)), Locality(bad, loc.S, loc.delta.members, loc.p)
    objects = sorted(loc.delta.members, key=lambda X: (len(X), sorted(X)))
    X = rng.choice(objects)
    m = Locality(pg, loc.S, loc.delta.members - {X}, loc.p, require_S=False)
    return ("delta", name, tuple(sorted(X))), m


def deletion_is_equivalent(name, X):
    loc, bl = load_example(name), oracles.brute(*oracles.SOURCES[name])
    perm = oracles.element_map(loc, bl)
    return bl.deletion_is_equivalent(frozenset(perm[x] for x in X))


def criterion_4():
    clean = []
    for name in ZOO:
        obj = load_example(name)
        if isinstance(obj, Locality):
            reps = [verify_partial_group(obj.pg, 3), verify_objectivity(obj, 3), verify_locality(obj)]
        else:
            reps = [verify_partial_group(obj, 4)]
        clean.append(all(r.ok for r in reps))
    rng = random.Random(MUTATION_SEED)
    detected = excluded = tried = 0
    missed = []
    while tried < MUTATIONS:
        desc, m = mutant(rng, LOCALITIES)
        if desc[0] == "delta" and deletion_is_equivalent(desc[1], desc[2]):
            excluded += 1
            continue
        tried += 1
        try:
            reps = [verify_partial_group(m.pg, 3), verify_objectivity(m, 3), verify_locality(m)]
        except (LocalityError, PartialGroupError) as exc:
            missed.append((desc, f"raised {exc}"))
            continue
        if any(has_witness(c) for r in reps for c in r.failures):
            detected += 1
        else:
            missed.append((desc, "no FAIL"))
    ok = all(clean) and detected == MUTATIONS
    detail = (f"zoo-clean={sum(clean)}/{len(clean)} mutations-detected={detected}/{MUTATIONS} "
              f"equivalent-excluded={excluded}")
    if missed:
        detail += f" first-miss={missed[0]}"
    return line(4, ok, detail)


# -- 5. normal theory on O4+(2) with the normal 3-subgroup -------------------------------------------

def criterion_5():
    loc = load_example("O4plus2:all")
    V = PartialNormalSubgroup(loc, example_subsets("O4plus2:all")["V"])
    bad = None
    for f in range(loc.n):
        x, g = frattini_decompose(V, f)
        good = (x in V.members and is_up_maximal(V, g) and V.T <= loc.sg[g]
                and loc.pg.in_domain((x, g)) and loc.mul(x, g) == f
                and loc.sg[f] == loc.s_w((x, g)))
        if not good:
            bad = bad if bad is not None else f
    cp = maximal_cosets(V)
    sizes = sorted(len(B) for B in cp.blocks)
    covered = sorted(x for B in cp.blocks for x in B) == list(range(loc.n))
    ok = bad is None and sizes == [9] * 8 and covered
    return line(5, ok, f"frattini-all-72={bad is None} blocks={len(sizes)}x{set(sizes)} partition={covered}")


# -- 6. quotients by every partial normal subgroup in the zoo -----------------------------------

def criterion_6():
    pairs = failures = 0
    first = None
    for name in LOCALITIES:
        loc = load_example(name)
        for N in all_partial_normal_subgroups(loc):
            pairs += 1
            q, rho = quotient(loc, N)
            rep = verify_quotient(loc, N)
            ok = (rep.ok and verify_locality(q).ok and rho.kernel() == N.members
                  and rho.fibers() == set(N.cosets.blocks)
                  and all(rho.image(loc.sg[g]) == q.sg[rho(g)]
                          for g in range(loc.n) if is_up_maximal(N, g)))
            if not ok:
                failures += 1
                first = first or (name, len(N))
    return line(6, failures == 0, f"pairs={pairs} failures={failures}" + (f" first={first}" if first else ""))


# -- 7. first isomorphism along every tower ----------------------------------------------------------

def criterion_7():
    towers = failures = 0
    for name in LOCALITIES:
        loc = load_example(name)
        normals = all_partial_normal_subgroups(loc)
        for M in normals:
            _, beta = quotient(loc, M)
            for N in normals:
                if not N.members <= M.members:
                    continue
                towers += 1
                gamma, rep = first_isomorphism(beta, N)
                _, rho = quotient(loc, N)
                factors = all(gamma(rho(g)) == beta(g) for g in range(loc.n))
                bijective = len(set(gamma.map)) == len(gamma.map) == beta.cod.n
                if not (rep.ok and factors and bijective == (N == M)):
                    failures += 1
    return line(7, failures == 0, f"towers={towers} failures={failures}")


# -- 8. the Theta construction on C3 x D8 -------------------------------------------------------------

def criterion_8():
    G, S, meta = named_example("C3xD8")
    loc = locality_from_group(G, S, [S.members], 2)
    pos = {g: i for i, g in enumerate(loc.embed)}
    C3 = frozenset(pos[g] for g in meta["C3"].members)
    res = theta_quotient(loc)
    st = res.report.status_of
    fusion = fusion_maps(loc).translate(res.projection.map) == fusion_maps(res.quotient)
    checks = {
        "theta=C3": res.theta.members == C3,
        "S-meets-trivially": res.theta.T == {loc.identity},
        "quotient-locality": verify_locality(res.quotient).ok,
        "fusion": fusion and st("theta.fusion") == "PASS",
        "object-normalizers": st("theta.object-normalizers") == "PASS",
    }
    return line(8, all(checks.values()), " ".join(f"{k}={v}" for k, v in checks.items()))


# -- 9. products of partial normal subgroups ---------------------------------------------------------------

def criterion_9():
    met = skipped = failures = 0
    for name in LOCALITIES:
        loc = load_example(name)
        for M, N in itertools.combinations(all_partial_normal_subgroups(loc), 2):
            rep = verify_product(loc, M, N)
            if normalization_failure(loc, M, N) is not None:
                skipped += rep.status_of("product.normal") == "SKIP"
                failures += rep.status_of("product.normal") != "SKIP"
                continue
            met += 1
            MN = product_set(loc, M.members, N.members)
            good = (MN == product_set(loc, N.members, M.members) and is_partial_normal(loc, MN)
                    and all(rep.status_of(c) == "PASS" for c in
                            ("product.commutes", "product.normal", "product.sylow", "product.split")))
            failures += not good
    return line(9, failures == 0, f"pairs-meeting-hypothesis={met} skipped={skipped} failures={failures}")


# -- 10. oracle cross-checks --------------------------------------------------------------------------------

def criterion_10():
    rng = random.Random(10)
    small = [name for name in ZOO if load_example(name).n <= 72]
    closure_bad = qstar_bad = 0
    for name in small:
        obj = load_example(name)
        pg = obj.pg if isinstance(obj, Locality) else obj
        gens = [[g] for g in range(pg.n)] + [rng.sample(range(pg.n), 2) for _ in range(20)]
        closure_bad += sum(binary_closure(pg, gs) != word_closure(pg, gs, 4) for gs in gens)
        if isinstance(obj, Locality):
            cands = {binary_closure(pg, gs) for gs in gens}
            qstar_bad += sum(is_subgroup_qstar(obj, H) != is_subgroup_words(obj, H, 4) for H in cands)
    op_bad = 0
    for name in LOCALITIES:
        loc, bl = load_example(name), oracles.brute(*oracles.SOURCES[name])
        perm = oracles.element_map(loc, bl)
        op_bad += frozenset(perm[x] for x in op_subgroup(loc)) != bl.op_subgroup()
    ok = closure_bad == qstar_bad == op_bad == 0
    return line(10, ok, f"closure-mismatches={closure_bad} op-mismatches={op_bad} "
                        f"qstar-mismatches={qstar_bad} instances={len(small)}")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 11)])
def test_acceptance(criterion):
    ok, text = criterion()
    assert ok, text


if __name__ == "__main__":
    results = [c()[0] for c in CRITERIA]
    sys.exit(0 if all(results) else 1)
