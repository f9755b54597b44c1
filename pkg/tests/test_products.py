import itertools

import pytest
from hypothesis import given, settings, strategies as st

from localities.locality import LocalityError
from localities.normal_quotient import (PartialNormalSubgroup, all_partial_normal_subgroups,
                                        is_partial_normal)
from localities.products import (ProductWitness, disjointness_criterion, generated_with_normal,
                                 normalization_failure, product_normal, product_set,
                                 split_product_element, verify_product)
from localities.report import HypothesisError
from localities.zoo import ZOO, example_subsets, load_example

import oracles

LOCALITIES = [name for name in ZOO if name != "free1"]


def normals(name):
    loc = load_example(name)
    return loc, all_partial_normal_subgroups(loc)


def pairs(name):
    loc, Ns = normals(name)
    return loc, list(itertools.combinations(Ns, 2))


# -- the product set against brute force ------------------------------------------------

@pytest.mark.parametrize("group,seed", [("D8", "sylow"), ("S4", "all"), ("C3xD8", "sylow")])
def test_product_set_matches_oracle(group, seed):
    loc, bl = load_example(f"{group}:{seed}"), oracles.brute(group, seed)
    perm = oracles.element_map(loc, bl)
    for M, N in itertools.product(all_partial_normal_subgroups(loc), repeat=2):
        want = {bl.product((perm[x], perm[y])) for x in M.members for y in N.members
                if bl.in_domain((perm[x], perm[y]))}
        assert {perm[g] for g in product_set(loc, M.members, N.members)} == want


# -- products of partial normal subgroups -------------------------------------------------

@pytest.mark.parametrize("name", LOCALITIES)
def test_every_pair_passes_or_skips(name):
    loc, ps = pairs(name)
    for M, N in ps:
        rep = verify_product(loc, M, N)
        assert rep.ok, rep.text()
        if normalization_failure(loc, M, N) is None:
            assert rep.status_of("product.split") == "PASS"
        else:
            assert rep.status_of("product.normal") == "SKIP"


@pytest.mark.parametrize("name", LOCALITIES)
def test_product_normal_when_hypothesis_holds(name):
    loc, ps = pairs(name)
    for M, N in ps:
        if normalization_failure(loc, M, N) is not None:
            with pytest.raises(HypothesisError):
                product_normal(loc, M, N)
            continue
        MN = product_normal(loc, M, N)
        assert is_partial_normal(loc, MN.members)
        assert MN.members == product_set(loc, N.members, M.members)
        assert M.members <= MN.members and N.members <= MN.members
        if M.members <= N.members:
            assert MN.members == N.members


def test_product_with_o4_absorbs_the_size_five_normals():
    loc = load_example("O4plus2:all")
    V = PartialNormalSubgroup(loc, example_subsets("O4plus2:all")["V"])
    fives = [N for N in all_partial_normal_subgroups(loc) if len(N) == 5]
    assert len(fives) == 2
    for F in fives:
        assert F.members < V.members
        assert product_normal(loc, F, V).members == V.members
        # F ∩ V = F holds non-p elements, so the criterion does not apply
        assert disjointness_criterion(loc, F, V).status_of("disjoint.normalizes") == "SKIP"


def test_hypothesis_failure_reports_clause_and_witness():
    loc, Ns = normals("O4plus2:all")
    found = False
    for M, N in itertools.combinations(Ns, 2):
        fail = normalization_failure(loc, M, N)
        if fail is None:
            continue
        found = True
        with pytest.raises(HypothesisError) as exc:
            product_normal(loc, M, N)
        assert exc.value.clause == fail[0] and exc.value.witness == fail[1]
        assert "normalize" in fail[0]
    assert found


def test_split_trivial_factors():
    loc, Ns = normals("C3xD8:sylow")
    M, N = Ns[2], Ns[7]
    for g in M.members:
        assert split_product_element(loc, M, N, g) == ProductWitness(g, g, loc.identity)
    for g in N.members - M.members:
        assert split_product_element(loc, M, N, g) == ProductWitness(g, loc.identity, g)


def test_split_outside_product_raises():
    loc, Ns = normals("C3xD8:sylow")
    one = Ns[0]
    outside = sorted(set(range(loc.n)) - one.members)[0]
    with pytest.raises(LocalityError):
        split_product_element(loc, one, one, outside)


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(["C3xD8:sylow", "S4:all", "D8:sylow", "S3:delta-C3"]), st.data())
def test_split_witness_is_a_factorization(name, data):
    loc, Ns = normals(name)
    M = data.draw(st.sampled_from(Ns))
    N = data.draw(st.sampled_from(Ns))
    if normalization_failure(loc, M, N) is not None:
        return
    MN = sorted(product_set(loc, M.members, N.members))
    g = data.draw(st.sampled_from(MN))
    w = split_product_element(loc, M, N, g)
    assert w.x in M.members and w.y in N.members
    assert loc.mul(w.x, w.y) == g
    assert loc.s_w((w.x, w.y)) == loc.sg[g]


# -- the disjointness criterion ---------------------------------------------------------------

@pytest.mark.parametrize("name", LOCALITIES)
def test_disjointness_criterion(name):
    loc, ps = pairs(name)
    for M, N in ps:
        rep = disjointness_criterion(loc, M, N)
        assert rep.ok, rep.text()
        if M.members & N.members <= loc.S:
            assert rep.status_of("disjoint.normalizes") == "PASS"
            assert rep.status_of("disjoint.product.split") == "PASS"
        else:
            assert rep.status_of("disjoint.normalizes") == "SKIP"


# -- joining a normalizing partial subgroup --------------------------------------------------

@pytest.mark.parametrize("name", ["S3:delta-C3", "D8:sylow", "S4:all", "O4plus2:sylow",
                                  "GL3_2:parabolic", "GL3_2:all"])
def test_generated_with_normal(name):
    loc, Ns = normals(name)
    built = 0
    for N, K in itertools.product(Ns, repeat=2):
        try:
            H, rep = generated_with_normal(loc, N, K.members)
        except HypothesisError as e:
            assert e.clause == "K does not centralize S∩N"
            continue
        built += 1
        assert rep.ok, rep.text()
        assert K.members | N.members <= H.members
        assert is_partial_normal(loc, H.members)
    assert built >= len(Ns)


def test_generated_needs_characteristic_p():
    for name in ("O4plus2:all", "C3xD8:sylow"):
        loc, Ns = normals(name)
        with pytest.raises(HypothesisError) as exc:
            generated_with_normal(loc, Ns[0], Ns[0].members)
        assert exc.value.clause == "object normalizer not of characteristic p"


def test_generated_needs_partial_normal_k():
    loc, Ns = normals("S4:all")
    C2 = frozenset({loc.identity, sorted(loc.S - {loc.identity})[0]})
    with pytest.raises(HypothesisError) as exc:
        generated_with_normal(loc, Ns[0], C2)
    assert "partial normal" in exc.value.clause
