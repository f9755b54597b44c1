import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from localities.group_core import (FiniteGroup, GroupError, PreconditionError, centralizer,
                                   conjugate_family_escapes, conjugate_set, cores, format_perm,
                                   generate_group, is_characteristic_p, is_normal, named_example,
                                   normal_subgroups, normalizer, parse_perm, parse_perm_list,
                                   quotient_group, subgroup_as_group, subgroup_closure,
                                   sylow_subgroup, transporter)

import oracles


def perm_group(*cycles):
    return generate_group([parse_perm(c) for c in cycles])


S3 = perm_group("(1 2 3)", "(1 2)")
D8 = perm_group("(1 2 3 4)", "(1 3)")


def index_of(G, text):
    perm = parse_perm(text, degree=len(G.perms[0]))
    return G.perms.index(perm)


# -- parsing -------------------------------------------------------------------------

def test_parse_cycles():
    assert parse_perm("(1 2 3)(4 5)") == (1, 2, 0, 4, 3)
    assert parse_perm("()") == ()
    assert parse_perm("( 1  2 )", degree=3) == (1, 0, 2)
    assert parse_perm_list("(1 2), (2 3)") == [(1, 0), (0, 2, 1)]


@pytest.mark.parametrize("bad", ["(1 2", "1 2", "(1 1)", "(0 1)", "(a b)"])
def test_parse_rejects(bad):
    with pytest.raises((GroupError, ValueError)):
        parse_perm(bad)


@given(st.permutations(range(6)))
def test_format_parse_round_trip(p):
    p = tuple(p)
    assert parse_perm(format_perm(p), degree=6) == p


# -- generation --------------------------------------------------------------------

def test_orders():
    assert S3.n == 6
    assert generate_group([]).n == 1
    assert D8.n == 8
    G, S, meta = named_example("GL3_2")
    assert (G.n, len(S)) == (168, 8)
    assert sorted(len(meta[k]) for k in ("M1", "M2")) == [24, 24]
    assert [len(meta[k]) for k in ("P1", "P2")] == [4, 4]
    G, S, meta = named_example("O4plus2")
    assert (G.n, len(S), len(meta["V"])) == (72, 8, 9)
    with pytest.raises(KeyError):
        named_example("nope")


def test_generation_is_breadth_first_and_deterministic():
    G = perm_group("(1 2 3)", "(1 2)")
    assert G.perms[0] == (0, 1, 2)
    assert G.perms[1] == parse_perm("(1 2 3)")
    assert G.perms == S3.perms
    assert np.array_equal(G.table, S3.table)


def test_size_cap():
    with pytest.raises(GroupError):
        generate_group([parse_perm("(1 2 3 4 5)"), parse_perm("(1 2)")], max_order=50)


def test_table_matches_composition():
    G, _, _ = named_example("GL3_2")
    for a, b in itertools.product(range(0, G.n, 7), range(0, G.n, 5)):
        assert G.perms[G.mul(a, b)] == oracles.mul(G.perms[a], G.perms[b])


def test_bad_table_rejected():
    t = S3.table.copy()
    t[1, 2], t[1, 3] = t[1, 3], t[1, 2]
    with pytest.raises(GroupError):
        FiniteGroup(t)


# -- subgroups ---------------------------------------------------------------------

def test_subgroup_closure():
    assert subgroup_closure(D8, [0]).members == {0}
    r = index_of(D8, "(1 2 3 4)")
    assert len(subgroup_closure(D8, [r])) == 4
    assert len(subgroup_closure(D8, range(D8.n))) == 8


def test_sylow_orders():
    assert len(sylow_subgroup(S3, 3)) == 3
    G, _, _ = named_example("GL3_2")
    assert len(sylow_subgroup(G, 2)) == 8
    assert len(sylow_subgroup(generate_group([]), 2)) == 1
    assert len(sylow_subgroup(S3, 5)) == 1


def test_transporter_examples():
    everything = frozenset(range(S3.n))
    assert transporter(S3, everything, everything) == everything
    P = subgroup_closure(S3, [index_of(S3, "(1 2)")])
    Q = subgroup_closure(S3, [index_of(S3, "(1 3)")])
    assert len(transporter(S3, P, Q)) == 2
    Z = centralizer(D8, range(D8.n))
    assert len(Z) == 2
    assert transporter(D8, Z, Z) == frozenset(range(8))
    assert normalizer(D8, Z).members == frozenset(range(8))


def test_transporter_brute_force():
    perms = S3.perms
    for P, Q in itertools.product(normal_subgroups(S3) + [P.members for P in [
            subgroup_closure(S3, [i]) for i in range(6)]], repeat=2):
        want = {g for g in range(6)
                if oracles.conj_set([perms[x] for x in P], perms[g]) <= {perms[y] for y in Q}}
        assert transporter(S3, P, Q) == want
        if want:
            assert len(P) <= len(Q)


def test_cores():
    op, opp = cores(D8, 2)
    assert len(op) == 8 and len(opp) == 1
    op, opp = cores(S3, 2)
    assert len(op) == 1 and len(opp) == 3
    G, _, _ = named_example("S3xC3")
    op, _ = cores(G, 3)
    # brute force: the largest normal 3-subgroup
    best = max((N for N in normal_subgroups(G) if len(N) in (1, 3, 9, 27)), key=len)
    assert op.members == best and len(op) == 9


@pytest.mark.parametrize("name", ["S3", "D8", "S4", "C6", "S3xC3", "C3xD8"])
def test_cores_contain_every_normal_subgroup_of_their_kind(name):
    G, _, meta = named_example(name)
    p = meta["p"]
    op, opp = cores(G, p)
    assert is_normal(G, op) and is_normal(G, opp)
    for N in normal_subgroups(G):
        n = len(N)
        while n % p == 0:
            n //= p
        if n == 1:
            assert N <= op.members
        if len(N) % p:
            assert N <= opp.members


def test_characteristic_p():
    assert is_characteristic_p(D8, 2)
    assert not is_characteristic_p(named_example("C6")[0], 2)
    assert is_characteristic_p(named_example("S4")[0], 2)


def test_quotient_group():
    Q, pi = quotient_group(S3, range(6))
    assert Q.n == 1
    C3 = sylow_subgroup(S3, 3)
    Q, pi = quotient_group(S3, C3)
    assert Q.n == 2 and pi.is_hom() and pi.kernel().members == C3.members
    Z = centralizer(D8, range(8))
    Q, pi = quotient_group(D8, Z)
    assert Q.n == 4 and all(Q.mul(x, x) == Q.identity for x in range(4))
    with pytest.raises(GroupError):
        quotient_group(S3, subgroup_closure(S3, [index_of(S3, "(1 2)")]))


def test_subgroup_as_group():
    _, _, meta = named_example("GL3_2")
    H, emb = subgroup_as_group(meta["M1"].parent, meta["M1"])
    assert H.n == 24 and H.labels[H.identity] == "()"


# -- conjugate families -------------------------------------------------------------

def test_conjugate_family_examples():
    S = subgroup_closure(D8, range(8))
    s = index_of(D8, "(1 3)")
    P = subgroup_closure(D8, [s]).members
    assert conjugate_family_escapes(S, P, [P])
    cls = {conjugate_set(D8, P, g) for g in range(8)}
    assert len(cls) == 2
    assert conjugate_family_escapes(S, P, cls)
    C4 = subgroup_closure(D8, [index_of(D8, "(1 2 3 4)")])
    Q = subgroup_closure(D8, [index_of(D8, "(1 3)(2 4)")]).members
    assert conjugate_family_escapes(C4, Q, [Q])
    with pytest.raises(PreconditionError):
        conjugate_family_escapes(S, P, [])
    with pytest.raises(PreconditionError):
        conjugate_family_escapes(S, P, [Q])


@pytest.mark.parametrize("name", ["D8", "S4", "C3xD8", "O4plus2"])
def test_conjugate_family_dichotomy_holds_everywhere(name):
    G, S, _ = named_example(name)
    from localities.group_core import all_subgroups
    for P in all_subgroups(G, within=S.members):
        cls = sorted({conjugate_set(G, P, s) for s in S.members}, key=sorted)
        for k in range(1, len(cls) + 1):
            for fam in itertools.combinations(cls, k):
                X = frozenset().union(*fam)
                if P in fam and all(conjugate_set(G, P, x) in fam for x in X):
                    assert conjugate_family_escapes(S, P, fam)


# -- properties ---------------------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(st.lists(st.permutations(range(5)), min_size=1, max_size=3))
def test_generated_groups_are_groups(gens):
    G = generate_group([tuple(g) for g in gens])
    t = G.table
    assert np.array_equal(t[t[:, :, None], np.arange(G.n)], t[np.arange(G.n)[:, None, None], t[None]])
    assert all(G.mul(g, G.inv[g]) == G.identity for g in range(G.n))
    for p in (2, 3, 5):
        P = sylow_subgroup(G, p)
        n = G.n
        while n % p == 0:
            n //= p
        assert len(P) * n == G.n
    for N in normal_subgroups(G):
        Q, pi = quotient_group(G, N)
        assert Q.n * len(N) == G.n and pi.is_hom() and pi.kernel().members == N
