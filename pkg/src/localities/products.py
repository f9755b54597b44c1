"""Products of partial normal subgroups."""
from __future__ import annotations

from dataclasses import dataclass

from .locality import Locality, LocalityError, centralizer_partial
from .normal_quotient import (PartialNormalSubgroup, _conj_closure, characteristic_p_failure,
                              is_partial_normal, normal_closure, quotient)
from .partial_group import binary_closure
from .report import HypothesisError, Report


@dataclass(frozen=True)
class ProductWitness:
    g: int
    x: int
    y: int


def _prod(loc: Locality, A, B) -> frozenset:
    rows = loc.pg.pair_rows
    return frozenset(rows[a][b] for a in A for b in B if rows[a][b] >= 0)


def normalization_failure(loc: Locality, M: PartialNormalSubgroup, N: PartialNormalSubgroup):
    """None when M normalizes S ∩ N and N normalizes S ∩ M; else (clause, element)."""
    U, V = M.T, N.T
    NV, NU = loc.normalizer(V), loc.normalizer(U)
    bad = sorted(M.members - NV)
    if bad:
        return "M does not normalize S∩N", bad[0]
    bad = sorted(N.members - NU)
    if bad:
        return "N does not normalize S∩M", bad[0]
    return None


def product_set(loc: Locality, M, N) -> frozenset:
    return _prod(loc, sorted(M), sorted(N))


def product_normal(loc: Locality, M: PartialNormalSubgroup,
                   N: PartialNormalSubgroup) -> PartialNormalSubgroup:
    """MN = {xy : x in M, y in N, (x, y) defined}; refuses unless each factor
    normalizes the other's intersection with S."""
    fail = normalization_failure(loc, M, N)
    if fail is not None:
        raise HypothesisError(*fail)
    return PartialNormalSubgroup(loc, product_set(loc, M, N), check=True)


def split_product_element(loc: Locality, M: PartialNormalSubgroup, N: PartialNormalSubgroup,
                          g: int) -> ProductWitness:
    """(x, y) in M × N with (x, y) defined, g = xy and S_g = S_(x,y).

    Factors in M or N split trivially; otherwise the smallest x, with y forced.
    """
    e = loc.identity
    if g in M.members:
        return ProductWitness(g, g, e)
    if g in N.members:
        return ProductWitness(g, e, g)
    rows, inv = loc.pg.pair_rows, loc.inv
    in_product = False
    for x in M.sorted:
        y = rows[inv[x]][g]
        if y < 0 or y not in N.members or rows[x][y] != g:
            continue
        in_product = True
        if loc.s_w((x, y)) == loc.sg[g]:
            return ProductWitness(g, x, y)
    if not in_product:
        raise LocalityError(f"element {g} is not in MN")
    raise LocalityError(f"no factorization of {g} preserving S_g")


def verify_product(loc: Locality, M: PartialNormalSubgroup, N: PartialNormalSubgroup) -> Report:
    rep = Report("product", meta={"|M|": len(M), "|N|": len(N)})
    fail = normalization_failure(loc, M, N)
    if fail is not None:
        rep.skip("product.normal", note=fail[0])
        return rep
    MN, NM = product_set(loc, M, N), product_set(loc, N, M)
    rep.meta["|MN|"] = len(MN)
    rep.add("product.commutes", MN == NM, sorted(MN ^ NM)[:1] or None)
    rep.add("product.normal", is_partial_normal(loc, MN))
    UV = _prod(loc, sorted(M.T), sorted(N.T))
    rep.add("product.sylow", loc.S & MN == UV, {"S∩MN": len(loc.S & MN), "UV": len(UV)})
    w = None
    for g in sorted(MN):
        try:
            split_product_element(loc, M, N, g)
        except LocalityError:
            w = w or g
    rep.add("product.split", w is None, w)
    return rep


def disjointness_criterion(loc: Locality, M: PartialNormalSubgroup,
                           N: PartialNormalSubgroup) -> Report:
    """When M ∩ N lies in S, each factor normalizes the other's part of S and
    the product is normal."""
    rep = Report("disjointness", meta={"|M|": len(M), "|N|": len(N)})
    inter = M.members & N.members
    if not inter <= loc.S:
        rep.skip("disjoint.normalizes", note="intersection-not-in-S")
        return rep
    fail = normalization_failure(loc, M, N)
    rep.add("disjoint.normalizes", fail is None, None if fail is None else {fail[0]: fail[1]})
    if fail is None:
        rep.extend(verify_product(loc, M, N), prefix="disjoint.")
    return rep


def generated_with_normal(loc: Locality, N: PartialNormalSubgroup, K) -> tuple[PartialNormalSubgroup, Report]:
    """⟨K, N⟩ for K partial normal in N_L(T) and centralizing T = S ∩ N, when every
    object normalizer has characteristic p."""
    K = frozenset(K)
    T = N.T
    P = characteristic_p_failure(loc)
    if P is not None:
        raise HypothesisError("object normalizer not of characteristic p", sorted(P))
    bad = sorted(K - centralizer_partial(loc, T))
    if bad:
        raise HypothesisError("K does not centralize S∩N", bad[0])
    NLT = loc.normalizer(T)
    if not K <= NLT or binary_closure(loc.pg, K) != K or _conj_closure(loc, K, NLT) != K:
        raise HypothesisError("K is not partial normal in the normalizer of S∩N")
    H = binary_closure(loc.pg, K | N.members)
    rep = Report("generated with normal", meta={"|N|": len(N), "|K|": len(K), "|<K,N>|": len(H)})
    q, rho = quotient(loc, N)
    Kbar = normal_closure(q, rho.image(K))
    rep.add("generated.preimage", H == rho.preimage(Kbar.members))
    normal = is_partial_normal(loc, H)
    rep.add("generated.normal", normal)
    rep.add("generated.sylow", loc.S & H == _prod(loc, sorted(loc.S & K), sorted(T)))
    CT = centralizer_partial(loc, T) & loc.S
    if _prod(loc, sorted(CT), sorted(T)) == loc.S:
        KN, NK = product_set(loc, K, N.members), product_set(loc, N.members, K)
        rep.add("generated.product", H == KN == NK)
    else:
        rep.skip("generated.product")
    if not normal:
        raise LocalityError("⟨K, N⟩ is not partial normal")
    return PartialNormalSubgroup(loc, H, check=False), rep
