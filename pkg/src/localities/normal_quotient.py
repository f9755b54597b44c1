"""Partial normal subgroups, maximal cosets and quotient localities."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .automaton import Automaton
from .group_core import cores, is_characteristic_p, quotient_group
from .locality import (Locality, LocalityError, fusion_maps, is_subgroup_qstar,
                       normalizer_sublocality, verify_locality)
from .partial_group import (PartialGroupHom, PartialGroupView, binary_closure,
                            is_partial_subgroup, verify_homomorphism)
from .report import HypothesisError, Report

LATTICE_CAP = 500


def _key(X) -> tuple:
    return (len(X), sorted(X))


# -- partial normal subgroups ----------------------------------------------------

def _conj_closed(loc: Locality, X, conjugators=None) -> bool:
    X = sorted(X)
    C = loc.conj_table[X] if conjugators is None else loc.conj_table[np.ix_(X, sorted(conjugators))]
    vals = C[C >= 0]
    mask = np.zeros(loc.n, dtype=bool)
    mask[X] = True
    return bool(mask[vals].all())


def is_partial_normal(loc: Locality, X) -> bool:
    X = frozenset(X)
    return is_partial_subgroup(loc.pg, X) and _conj_closed(loc, X)


def _conj_closure(loc: Locality, X, conjugators=None) -> frozenset:
    """Close under binary products and the defined conjugations."""
    cur = binary_closure(loc.pg, X)
    cols = slice(None) if conjugators is None else sorted(conjugators)
    while True:
        C = loc.conj_table[sorted(cur)][:, cols]
        new = cur | frozenset(C[C >= 0].tolist())
        if new == cur:
            return cur
        cur = binary_closure(loc.pg, new)


class UpPair(NamedTuple):
    f: int
    P: frozenset


class PartialNormalSubgroup:
    """A partial normal subgroup N of a locality, with T = S ∩ N."""

    def __init__(self, loc: Locality, members, check: bool = True):
        self.loc = loc
        self.members = frozenset(int(x) for x in members)
        if check and not is_partial_normal(loc, self.members):
            raise LocalityError("not a partial normal subgroup")
        self.T = self.members & loc.S
        self.sorted = sorted(self.members)

    def __len__(self):
        return len(self.members)

    def __contains__(self, g):
        return g in self.members

    def __iter__(self):
        return iter(self.sorted)

    def __eq__(self, other):
        return isinstance(other, PartialNormalSubgroup) and self.members == other.members

    def __hash__(self):
        return hash(self.members)

    def __repr__(self):
        return f"PartialNormalSubgroup(|N|={len(self)}, |T|={len(self.T)})"

    def transporter(self, P, Q) -> list[int]:
        """N_N(P, Q): elements x of N with P ≤ S_x and P^x ≤ Q."""
        loc = self.loc
        return [x for x in self.sorted if P <= loc.sg[x] and loc.conj_set(P, x) <= Q]

    @cached_property
    def up_matrix(self) -> np.ndarray:
        """U[f, g] = (f, S_f) ↑ (g, S_g)."""
        loc, n = self.loc, self.loc.n
        U = np.zeros((n, n), dtype=bool)
        for f in range(n):
            for g in self._up_candidates(f):
                if up_rel(self, UpPair(f, loc.sg[f]), UpPair(g, loc.sg[g])):
                    U[f, g] = True
        return U

    def _up_candidates(self, f: int) -> set[int]:
        """Elements g = x^-1 (f y) for x, y in N: every g with (f, S_f) ↑ (g, Q)."""
        loc, rows, inv = self.loc, self.loc.pg.pair_rows, self.loc.inv
        P = loc.sg[f]
        Pf = loc.sg[inv[f]]
        xs = [x for x in self.sorted if P <= loc.sg[x]]
        ys = [y for y in self.sorted if Pf <= loc.sg[y]]
        out = set()
        for y in ys:
            h = rows[f][y]
            if h < 0:
                continue
            for x in xs:
                g = rows[inv[x]][h]
                if g >= 0:
                    out.add(g)
        return out

    @cached_property
    def up_maximal(self) -> np.ndarray:
        loc = self.loc
        sizes = np.array([len(X) for X in loc.sg])
        U = self.up_matrix
        return ~(U & (sizes[None, :] > sizes[:, None])).any(axis=1)

    @cached_property
    def cosets(self) -> "CosetPartition":
        return maximal_cosets(self)

    @cached_property
    def overgroups(self) -> set:
        """Partial subgroups of L containing N, or None past LATTICE_CAP."""
        pg = self.loc.pg
        try:
            return _join_lattice(pg, {binary_closure(pg, {f}, base=self.members)
                                      for f in range(self.loc.n)})
        except LocalityError:
            return None


def normal_closure(loc: Locality, X) -> PartialNormalSubgroup:
    return PartialNormalSubgroup(loc, _conj_closure(loc, set(X) | {loc.identity}), check=True)


def all_partial_normal_subgroups(loc: Locality, cap: int = LATTICE_CAP) -> list[PartialNormalSubgroup]:
    """Normal closures of single elements and all their joins, sorted by size."""
    atoms = {}
    for g in range(loc.n):
        N = _conj_closure(loc, {g})
        atoms.setdefault(N, g)
    found = set(atoms)
    frontier = set(found)
    while frontier:
        new = set()
        for A in frontier:
            for B in list(found):
                if A <= B or B <= A:
                    continue
                J = _conj_closure(loc, A | B)
                if J not in found and J not in new:
                    new.add(J)
        found |= new
        if len(found) > cap:
            raise LocalityError(f"more than {cap} partial normal subgroups")
        frontier = new
    return [PartialNormalSubgroup(loc, N, check=False) for N in sorted(found, key=_key)]


# -- the ↑ relation --------------------------------------------------------------

def up_rel(N: PartialNormalSubgroup, a: UpPair, b: UpPair) -> bool:
    """(f, P) ↑ (g, Q): some x in N_N(P, Q) and y in N_N(P^f, Q^g) with xg = fy.

    Given x, the element y is forced to be f^-1 (xg), so one pass over N suffices.
    """
    loc = N.loc
    rows, inv = loc.pg.pair_rows, loc.inv
    f, P = a
    g, Q = b
    if not (P <= loc.sg[f] and Q <= loc.sg[g]):
        raise LocalityError("not a pair (f, P) with P ≤ S_f")
    Pf = loc.conj_set(P, f)
    Qg = loc.conj_set(Q, g)
    for x in N.transporter(P, Q):
        h = rows[x][g]
        if h < 0:
            continue
        y = rows[inv[f]][h]
        if y < 0 or y not in N.members or rows[f][y] != h:
            continue
        if Pf <= loc.sg[y] and loc.conj_set(Pf, y) <= Qg:
            return True
    return False


def is_up_maximal(N: PartialNormalSubgroup, f: int) -> bool:
    return bool(N.up_maximal[f])


def frattini_decompose(N: PartialNormalSubgroup, f: int) -> tuple[int, int]:
    """(x, g) with x in N, g ↑-maximal, (x, g) defined and f = xg.

    Elements of N split as (f, 1), other ↑-maximal elements as (1, f); otherwise
    g is the ↑-maximal element of smallest index that works, and x is forced.
    """
    loc = N.loc
    e = loc.identity
    if f in N.members:
        return f, e
    if N.up_maximal[f]:
        return e, f
    rows, inv = loc.pg.pair_rows, loc.inv
    for g in np.nonzero(N.up_maximal)[0].tolist():
        x = rows[f][inv[g]]
        if x >= 0 and x in N.members and rows[x][g] == f:
            return x, g
    raise LocalityError(f"no decomposition of element {f}")


# -- maximal cosets ----------------------------------------------------------------

@dataclass
class CosetPartition:
    N: PartialNormalSubgroup
    blocks: list
    rep: list
    block_of: list

    def __len__(self):
        return len(self.blocks)


def left_coset(N: PartialNormalSubgroup, f: int) -> frozenset:
    rows = N.loc.pg.pair_rows
    return frozenset(rows[y][f] for y in N.sorted if rows[y][f] >= 0)


def right_coset(N: PartialNormalSubgroup, f: int) -> frozenset:
    rows = N.loc.pg.pair_rows
    return frozenset(rows[f][y] for y in N.sorted if rows[f][y] >= 0)


def maximal_cosets(N: PartialNormalSubgroup) -> CosetPartition:
    """Blocks N f for ↑-maximal f, represented by their smallest ↑-maximal member.

    The block of the identity comes first; the others follow by representative.
    """
    loc = N.loc
    reps: dict = {}
    for f in np.nonzero(N.up_maximal)[0].tolist():
        reps.setdefault(left_coset(N, f), f)
    blocks = sorted(reps, key=lambda B: (loc.identity not in B, reps[B]))
    block_of = [-1] * loc.n
    for i, B in enumerate(blocks):
        for g in B:
            if block_of[g] >= 0:
                raise LocalityError(f"element {g} lies in two maximal cosets")
            block_of[g] = i
    if -1 in block_of:
        raise LocalityError(f"element {block_of.index(-1)} lies in no maximal coset")
    return CosetPartition(N, blocks, [reps[B] for B in blocks], block_of)


# -- projections and quotients -------------------------------------------------------

@dataclass
class Projection:
    dom: Locality
    cod: Locality
    map: tuple

    def __call__(self, g: int) -> int:
        return self.map[g]

    def image(self, X) -> frozenset:
        return frozenset(self.map[x] for x in X)

    def preimage(self, X) -> frozenset:
        X = set(X)
        return frozenset(g for g in range(self.dom.n) if self.map[g] in X)

    @property
    def hom(self) -> PartialGroupHom:
        return PartialGroupHom(self.dom.pg, self.cod.pg, tuple(self.map))

    def kernel(self) -> frozenset:
        return frozenset(g for g in range(self.dom.n) if self.map[g] == self.cod.identity)

    def fibers(self) -> set:
        out: dict = {}
        for g, v in enumerate(self.map):
            out.setdefault(v, set()).add(g)
        return {frozenset(B) for B in out.values()}


def domain_onto_witness(beta: Projection):
    """A word accepted by the codomain none of whose preimages is accepted, or None.

    Runs a subset construction over the domain automaton, so every word is covered.
    """
    a, b = beta.dom.pg.automaton, beta.cod.pg.automaton
    if a is None or b is None:
        raise LocalityError("exact check needs automata on both sides")
    fiber = [[] for _ in range(beta.cod.n)]
    for g, v in enumerate(beta.map):
        fiber[v].append(g)
    start = (b.start, frozenset([a.start]))
    parent = {start: None}
    queue = [start]
    for node in queue:
        t, states = node
        if not b.accept[t]:
            continue
        if not any(a.accept[s] for s in states):
            word = []
            while parent[node] is not None:
                node, letter = parent[node]
                word.append(letter)
            return tuple(reversed(word))
        for v in range(beta.cod.n):
            nxt = (int(b.trans[t, v]),
                   frozenset(int(a.trans[s, g]) for s in states for g in fiber[v]))
            if nxt not in parent:
                parent[nxt] = (node, v)
                queue.append(nxt)
    return None


def verify_projection(beta: Projection, max_len: int = 3) -> Report:
    rep = Report("projection", meta={"dom": beta.dom.n, "cod": beta.cod.n})
    rep.extend(verify_homomorphism(beta.hom, max_len), prefix="projection.")
    rep.add("projection.elements-onto", set(beta.map) == set(range(beta.cod.n)),
            sorted(set(range(beta.cod.n)) - set(beta.map))[:1] or None)
    w = domain_onto_witness(beta)
    rep.add("projection.domain-onto", w is None, w, bound="exact")
    imgs = {beta.image(P) for P in beta.dom.delta.members}
    rep.add("projection.objects", imgs == beta.cod.delta.members,
            sorted(imgs ^ beta.cod.delta.members, key=_key)[:1] or None)
    rep.add("projection.sylow-image", beta.image(beta.dom.S) == beta.cod.S)
    K = beta.kernel()
    if not is_partial_normal(beta.dom, K):
        rep.fail("projection.fibers", {"kernel": sorted(K)}, note="kernel not partial normal")
    else:
        blocks = set(maximal_cosets(PartialNormalSubgroup(beta.dom, K, check=False)).blocks)
        fibers = beta.fibers()
        rep.add("projection.fibers", fibers == blocks,
                sorted(fibers ^ blocks, key=_key)[:1] or None)
    return rep


def quotient(loc: Locality, N: PartialNormalSubgroup, name: str = "") -> tuple[Locality, Projection]:
    """The locality of maximal cosets of N, and the projection onto it.

    A quotient word is defined exactly when the word of block representatives is.
    """
    if N.loc is not loc:
        raise LocalityError("normal subgroup belongs to another locality")
    part = N.cosets
    m, R, rho = len(part), part.rep, part.block_of
    pg = loc.pg
    px = pg.pair[np.ix_(R, R)]
    rho_arr = np.asarray(rho + [-1], dtype=np.int64)
    pair = np.where(px >= 0, rho_arr[px], -1)
    inv = [rho[loc.inv[r]] for r in R]
    kw = {}
    if pg.automaton is not None:
        kw["automaton"] = pg.automaton.relabel(R)
    else:
        kw["oracle"] = lambda w: pg.in_domain(tuple(R[i] for i in w))
    labels = ["[" + pg.label(r) + "]" for r in R]
    name = name or f"{loc.name}/N{len(N)}"
    qpg = PartialGroupView(m, rho[loc.identity], inv, pair, labels=labels, name=name,
                           oracle_name="delta", **kw)
    S = frozenset(rho[s] for s in loc.S)
    delta = {frozenset(rho[x] for x in P) for P in loc.delta.members}
    q = Locality(qpg, S, delta, loc.p, name=name)
    return q, Projection(loc, q, tuple(rho))


def quotient_word_check(N: PartialNormalSubgroup, q: Locality, max_len: int = 3):
    """Over ↑-maximal words of length ≤ max_len: words with the same image are all
    accepted or all rejected, and accepted ones have products in one block.
    Returns a witness pair of words or None."""
    loc = N.loc
    a = loc.pg.automaton
    U = np.nonzero(N.up_maximal)[0]
    rho = np.asarray(N.cosets.block_of, dtype=np.int64)
    m, u = len(N.cosets), len(U)
    px = loc.pg.pairx
    for k in range(1, max_len + 1):
        if u ** k > 3_000_000:
            return None, k - 1
        idx = np.indices((u,) * k).reshape(k, -1)
        letters = U[idx]
        if a is not None:
            st = np.full(letters.shape[1], a.start)
            for i in range(k):
                st = a.trans[st, letters[i]]
            acc = a.accept[st]
        else:
            acc = np.array([loc.pg.in_domain(tuple(w)) for w in letters.T.tolist()])
        prod = letters[0].copy()
        for i in range(1, k):
            prod = px[prod, letters[i]]
        img = np.zeros(letters.shape[1], dtype=np.int64)
        for i in range(k):
            img = img * m + rho[letters[i]]
        cls = np.where(acc, rho[np.where(prod >= 0, prod, 0)], -1)
        order = np.lexsort((cls, img))
        si, sc = img[order], cls[order]
        same = si[1:] == si[:-1]
        bad = np.nonzero(same & (sc[1:] != sc[:-1]))[0]
        if len(bad):
            i, j = order[bad[0]], order[bad[0] + 1]
            return (tuple(letters[:, i].tolist()), tuple(letters[:, j].tolist())), k
    return None, max_len


# -- isomorphism theorems ------------------------------------------------------------

def first_isomorphism(beta: Projection, N: PartialNormalSubgroup) -> tuple[Projection, Report]:
    """γ: L/N → L' with ρ∘γ = β, and the checks that it is the unique such projection."""
    K = beta.kernel()
    if not N.members <= K:
        raise LocalityError("N is not contained in the kernel")
    loc = beta.dom
    q, rho = quotient(loc, N)
    gamma_map = [None] * q.n
    consistent = True
    for g in range(loc.n):
        i = rho(g)
        if gamma_map[i] is None:
            gamma_map[i] = beta(g)
        elif gamma_map[i] != beta(g):
            consistent = False
    rep = Report("first isomorphism", meta={"|N|": len(N), "|Ker|": len(K)})
    rep.add("isomorphism.well-defined", consistent)
    gamma = Projection(q, beta.cod, tuple(gamma_map))
    if consistent:
        rep.extend(verify_projection(gamma), prefix="isomorphism.")
        bad = [g for g in range(loc.n) if gamma(rho(g)) != beta(g)]
        rep.add("isomorphism.factors", not bad, bad[:1] or None)
        # ρ is onto, so the factorization pins γ down on every coset
        rep.add("isomorphism.unique", set(rho.map) == set(range(q.n)))
        bij = len(set(gamma_map)) == q.n == beta.cod.n
        rep.add("isomorphism.iso-iff-kernel", bij == (N.members == K),
                {"bijective": bij, "N=Ker": N.members == K})
    return gamma, rep


def _join_lattice(pg: PartialGroupView, atoms, cap: int = LATTICE_CAP) -> set:
    """All joins of the given partial subgroups; each is a join of atoms, so
    joining found members with single atoms reaches everything."""
    atoms = sorted(set(atoms), key=_key)
    found = set(atoms)
    frontier = list(atoms)
    while frontier:
        new = []
        for A in frontier:
            for B in atoms:
                if B <= A:
                    continue
                J = binary_closure(pg, B, base=A)
                if J not in found:
                    found.add(J)
                    new.append(J)
        if len(found) > cap:
            raise LocalityError(f"more than {cap} partial subgroups")
        frontier = new
    return found


def subgroup_correspondence(loc: Locality, N: PartialNormalSubgroup,
                            cap: int = LATTICE_CAP) -> Report:
    q, rho = quotient(loc, N)
    rep = Report("subgroup correspondence", meta={"|N|": len(N), "|L/N|": q.n})
    up = N.overgroups
    try:
        if up is None:
            raise LocalityError(f"more than {LATTICE_CAP} partial subgroups")
        down = _join_lattice(q.pg, {binary_closure(q.pg, {g}) for g in range(q.n)}, cap)
    except LocalityError as exc:
        rep.skip("correspondence.bijection", note=str(exc))
        return rep
    rep.meta["partial-subgroups"] = len(up)
    blocks = N.cosets.blocks
    bad = [sorted(H) for H in up if any(not (B <= H or not (B & H)) for B in blocks)]
    rep.add("correspondence.coset-unions", not bad, bad[:1] or None)
    images = {H: rho.image(H) for H in up}
    injective = len(set(images.values())) == len(up)
    rep.add("correspondence.bijection", injective and set(images.values()) == down,
            {"up": len(up), "down": len(down), "images": len(set(images.values()))})
    bad = [sorted(H) for H in up
           if is_partial_normal(loc, H) != is_partial_normal(q, images[H])]
    rep.add("correspondence.normality", not bad, bad[:1] or None)
    samples = [loc.S] + sorted(loc.delta.members, key=_key) + \
        [loc.normalizer(P) for P in sorted(loc.delta.members, key=_key)]
    bad = None
    for X in samples:
        for H in sorted(up, key=_key):
            if rho.image(X & H) != rho.image(X) & images[H]:
                bad = bad or {"X": sorted(X), "H": sorted(H)}
    rep.add("correspondence.intersection-image", bad is None, bad)
    bad = None
    for M in sorted(up, key=_key):
        if is_partial_normal(loc, M):
            U = rho.image(loc.S & M)
            if not is_maximal_p_subgroup(q, U, images[M]):
                bad = bad or sorted(M)
    rep.add("correspondence.sylow-image", bad is None, bad)
    return rep


def is_maximal_p_subgroup(loc: Locality, U, H) -> bool:
    """U ≤ S is a maximal p-subgroup of the partial subgroup H.

    A larger p-subgroup R would give some x in N_R(U) outside U, and then ⟨U, x⟩
    is a p-subgroup of H properly containing U.
    """
    U, H = frozenset(U), frozenset(H)
    if not U <= H:
        return False
    for x in sorted(loc.normalizer(U) & H - U):
        J = binary_closure(loc.pg, U | {x})
        if J <= H and loc.is_p_group(J) and is_subgroup_qstar(loc, J):
            return False
    return True


# -- characteristic p and the Θ construction ---------------------------------------

def object_normalizer_groups(loc: Locality):
    """(P, N_L(P) as a group, embedding) for each object P."""
    for P in sorted(loc.delta.members, key=_key):
        M, emb = loc.as_group(loc.normalizer(P))
        yield P, M, emb


def characteristic_p_failure(loc: Locality):
    """First object P with N_L(P) not of characteristic p, or None."""
    for P, M, _ in object_normalizer_groups(loc):
        if not is_characteristic_p(M, loc.p):
            return P
    return None


@dataclass
class ThetaResult:
    theta: PartialNormalSubgroup
    quotient: Locality
    projection: Projection
    report: Report
    parts: dict


def theta_quotient(loc: Locality) -> ThetaResult:
    """Quotient by the union of the p'-cores of the object normalizers."""
    rep = Report(f"theta ({loc.name})", meta=loc.summary())
    parts = {}
    for P, M, emb in object_normalizer_groups(loc):
        _, opp = cores(M, loc.p)
        th = frozenset(emb[i] for i in opp.members)
        Q, pi = quotient_group(M, opp.members)
        if not is_characteristic_p(Q, loc.p):
            rep.skip("theta.hypothesis", note="object-normalizer-quotient-not-characteristic-p")
            raise HypothesisError("N_L(P)/Theta(P) is not of characteristic p", sorted(P), rep)
        parts[P] = th
    rep.add("theta.hypothesis", True)
    theta = frozenset().union(*parts.values())
    ok = is_partial_normal(loc, theta)
    rep.add("theta.normal", ok, None if ok else sorted(theta))
    if not ok:
        raise LocalityError("union of p'-cores is not partial normal")
    N = PartialNormalSubgroup(loc, theta, check=False)
    rep.add("theta.meets-S-trivially", N.T == {loc.identity}, sorted(N.T))
    q, rho = quotient(loc, N, name=f"{loc.name}/Theta")
    rep.add("theta.injective-on-S", len(rho.image(loc.S)) == len(loc.S))
    rep.extend(verify_projection(rho), prefix="theta.")
    rep.extend(verify_locality(q), prefix="theta.quotient.")
    f_up = fusion_maps(loc).translate(rho.map)
    f_down = fusion_maps(q)
    rep.add("theta.fusion", f_up == f_down,
            {"up": len(f_up), "down": len(f_down), "diff": len(f_up.maps ^ f_down.maps)})
    bad = None
    for P, th in parts.items():
        NP = loc.normalizer(P)
        NPbar = q.normalizer(rho.image(P))
        kernel = frozenset(g for g in NP if rho(g) == q.identity)
        hom = all(rho(loc.mul(a, b)) == q.mul(rho(a), rho(b)) for a in NP for b in NP)
        if rho.image(NP) != NPbar or kernel != th or not hom:
            bad = bad or {"P": sorted(P), "issue": "isomorphism"}
            continue
        M, _ = q.as_group(NPbar)
        if not is_characteristic_p(M, q.p):
            bad = bad or {"P": sorted(P), "issue": "characteristic"}
    rep.add("theta.object-normalizers", bad is None, bad)
    return ThetaResult(N, q, rho, rep, parts)


# -- the normal-subgroup sweep -----------------------------------------------------------

def _s_word(loc: Locality, word) -> frozenset:
    return loc.s_w(word)


def _frattini_calculus_witness(loc: Locality, NLT, Nlist):
    """Check both rearrangements of Π(f1, g1, f2, g2) for f_i in N_L(T), g_i in N.

    Returns (witness or None, number of defined words examined).
    """
    pg, n = loc.pg, loc.n
    a = pg.automaton
    sw, _ = loc.sw
    dom_id = {}
    sw_dom = np.array([dom_id.setdefault(d, len(dom_id)) for d in loc._sw_domains])
    px = pg.pairx
    inv = np.append(pg._inv_arr, n)
    C = np.full((n + 1, n + 1), -1, dtype=np.int64)
    C[:n, :n] = loc.conj_table
    C[C < 0] = n
    C[n, :] = n
    F = np.asarray(NLT, dtype=np.int64)
    G = np.asarray(Nlist, dtype=np.int64)
    g1, f2, g2 = (x.reshape(-1) for x in np.meshgrid(G, F, G, indexing="ij"))

    def run(aut, *letters):
        st = np.full(len(letters[0]), aut.start)
        for x in letters:
            st = aut.trans[st, np.where(x >= n, 0, x)]
        return st

    def ok(x):
        return x < n

    count = 0
    for f in F.tolist():
        f1 = np.full(len(g1), f)
        acc = a.accept[run(a, f1, g1, f2, g2)]
        if not acc.any():
            continue
        sel = np.nonzero(acc)[0]
        w1, w2_, w3, w4 = f1[sel], g1[sel], f2[sel], g2[sel]
        count += len(sel)
        prod = px[px[px[w1, w2_], w3], w4]
        u_ok = a.accept[run(a, inv[w3], w2_, w3)]
        gb1 = np.where(u_ok, px[px[inv[w3], w2_], w3], -1)
        gb1 = np.where(gb1 < 0, n, gb1)
        v_ok = u_ok & a.accept[run(a, w1, w3, gb1, w4)]
        same_s = sw_dom[run(sw, w1, w3, gb1, w4)] == sw_dom[run(sw, w1, w2_, w3, w4)]
        f12 = px[w1, w3]
        prod_a = px[f12, px[gb1, w4]]
        good_a = v_ok & same_s & (px[px[px[w1, w3], gb1], w4] == prod) & (prod_a == prod)
        f12x = np.where(f12 < 0, n, f12)
        gt1 = C[w2_, inv[w1]]
        gt2 = C[w4, inv[f12x]]
        prod_b = px[px[np.where(ok(gt1), gt1, n), np.where(ok(gt2), gt2, n)], f12x]
        good_b = prod_b == prod
        bad = np.nonzero(~(good_a & good_b))[0]
        if len(bad):
            k = bad[0]
            return {"w": (int(w1[k]), int(w2_[k]), int(w3[k]), int(w4[k])),
                    "form": "a" if not good_a[k] else "b"}, count
    return None, count


def verify_normal_theory(loc: Locality, N: PartialNormalSubgroup, max_len: int = 3) -> Report:
    rep = Report(f"normal subgroup ({loc.name}, |N|={len(N)})",
                 meta={"|N|": len(N), "|T|": len(N.T), "|L|": loc.n})
    if not is_partial_normal(loc, N.members):
        rep.fail("normal.partial-normal", sorted(N.members))
        return rep
    rep.add("normal.partial-normal", True)
    pg, rows, inv = loc.pg, loc.pg.pair_rows, loc.inv
    T, S, e = N.T, loc.S, loc.identity
    Nm = N.members
    s_subs = loc.s_subgroups

    def prodset(A, B):
        return frozenset(rows[a][b] for a in A for b in B)

    w = next((g for g in range(loc.n) if not loc.conj_set(T & loc.sg[g], g) <= T), None)
    rep.add("normal.T-invariant", w is None, w)

    w = None
    for x in N.sorted:
        for P in s_subs:
            if P <= loc.sg[x] and prodset(P, T) != prodset(loc.conj_set(P, x), T):
                w = w or {"x": x, "P": sorted(P)}
    rep.add("normal.T-products", w is None, w)

    rep.add("normal.T-maximal", is_maximal_p_subgroup(loc, T, Nm))

    NLT = sorted(loc.normalizer(T))
    w = None
    for x in N.sorted:
        for f in NLT:
            if rows[x][f] >= 0:
                xf = loc.conj_elem(x, f)
                if not (pg.in_domain((f, inv[f], x, f)) and xf >= 0 and rows[f][xf] == rows[x][f]
                        and _s_word(loc, (x, f)) == _s_word(loc, (f, xf)) == loc.sg[x] & loc.sg[f]):
                    w = w or {"x": x, "f": f}
            if rows[f][x] >= 0:
                y = loc.conj_elem(x, inv[f])
                if not (pg.in_domain((f, x, inv[f], f)) and y >= 0 and rows[y][f] == rows[f][x]
                        and _s_word(loc, (f, x)) == _s_word(loc, (y, f)) == loc.sg[y] & loc.sg[f]):
                    w = w or {"f": f, "y": x}
    rep.add("normal.commuting", w is None, w)

    # conjugated words over N_L(T), lengths 1 and 2
    w = None
    wlen = 2 if len(NLT) ** 2 * len(N) <= 200_000 else 1
    for k in range(1, wlen + 1):
        for word in itertools.product(NLT, repeat=k):
            if not pg.in_domain(word):
                continue
            g = pg.fold(word)
            wi = pg.inverse_word(word)
            for x in N.sorted:
                left = (x,) + word
                if pg.in_domain(left):
                    P = loc.s_w(left)
                    u = wi + (x,) + word
                    if not pg.in_domain(u) or loc.s_w(u) != loc.conj_set(P, g):
                        w = w or {"x": x, "w": word, "side": "left"}
                right = word + (x,)
                if pg.in_domain(right):
                    Q = loc.s_w(right)
                    v = word + (x,) + wi
                    if not pg.in_domain(v) or loc.s_w(v) != Q:
                        w = w or {"w": word, "y": x, "side": "right"}
    rep.add("normal.conjugated-words", w is None, w, bound=wlen)

    w, count = _frattini_calculus_witness(loc, NLT, N.sorted)
    rep.add("normal.frattini-calculus", w is None, w, bound=4, note=f"{count} words")

    P_bad = characteristic_p_failure(loc)
    CT = frozenset(x for x in S if all(rows[x][t] == rows[t][x] for t in T))
    if P_bad is not None:
        rep.skip("normal.centralizer-invariance")
    else:
        CTT = prodset(CT, T)
        NNT = Nm & frozenset(NLT)
        ok = NNT <= loc.normalizer(CTT) and loc.normalizer(CTT) <= loc.normalizer(CT)
        rep.add("normal.centralizer-invariance", ok)

    U = N.up_matrix
    n = loc.n
    rep.add("normal.up-reflexive", bool(np.diag(U).all()), np.nonzero(~np.diag(U))[0][:1].tolist() or None)
    U2 = (U.astype(np.int64) @ U.astype(np.int64)) > 0
    bad = np.argwhere(U2 & ~U)
    rep.add("normal.up-transitive", not len(bad), bad[0].tolist() if len(bad) else None)
    um = N.up_maximal
    NLS = sorted(loc.normalizer(S))
    rep.add("normal.up-normalizer-of-S", bool(um[NLS].all()),
            [f for f in NLS if not um[f]][:1] or None)
    rep.add("normal.up-inverse", bool((um == um[inv]).all()),
            np.nonzero(um != um[inv])[0][:1].tolist() or None)
    w = None
    for f in np.nonzero(um)[0].tolist():
        for g in N._up_candidates(f):
            for Q in loc.delta.members:
                if Q <= loc.sg[g] and up_rel(N, UpPair(f, loc.sg[f]), UpPair(g, Q)):
                    if not um[g] or Q != loc.sg[g]:
                        w = w or {"f": f, "g": g, "Q": sorted(Q)}
    rep.add("normal.up-target", w is None, w)
    w = next((f for f in np.nonzero(um)[0].tolist() if not T <= loc.sg[f]), None)
    rep.add("normal.T-in-S_f", w is None, w)

    S_is_CTT = prodset(CT, T) == S
    NNT = Nm & frozenset(NLT)
    if S_is_CTT and NNT <= loc.normalizer(S):
        w = next((f for f in NLT if not um[f]), None)
        rep.add("normal.normalizer-of-T-maximal", w is None, w)
    else:
        rep.skip("normal.normalizer-of-T-maximal")

    w = None
    for f in range(n):
        try:
            x, g = frattini_decompose(N, f)
        except LocalityError:
            w = w or {"f": f, "issue": "none"}
            continue
        if not (x in Nm and um[g] and rows[x][g] == f and loc.s_w((x, g)) == loc.sg[f]):
            w = w or {"f": f, "x": x, "g": g}
    rep.add("normal.frattini", w is None, w)

    w = None
    for f in np.nonzero(um)[0].tolist():
        for x in N.sorted:
            if rows[x][f] >= 0:
                xf = loc.conj_elem(x, f)
                if xf < 0 or not (loc.s_w((x, f)) == loc.sg[rows[x][f]] == loc.s_w((f, xf))):
                    w = w or {"x": x, "f": f}
    rep.add("normal.splitting", w is None, w)

    w = None
    seen = set()
    conj_set = sorted(Nm | frozenset(NLT))
    for x in N.sorted:
        K = _conj_closure(loc, {x}, conjugators=conj_set)
        if K in seen:
            continue
        seen.add(K)
        if not is_partial_normal(loc, K):
            w = w or sorted(K)
    rep.add("normal.invariant-subgroups", w is None, w, note=f"{len(seen)} subgroups")

    part = N.cosets
    rep.meta["blocks"] = len(part)
    w = None
    for f in np.nonzero(um)[0].tolist():
        L_ = left_coset(N, f)
        R_ = right_coset(N, f)
        both = frozenset(rows[h][y] for h in L_ for y in N.sorted if rows[h][y] >= 0)
        if not L_ == R_ == both:
            w = w or {"f": f}
    rep.add("normal.coset-sides", w is None, w)
    w = None
    for f in np.nonzero(um)[0].tolist():
        Nf = left_coset(N, f)
        for g in range(n):
            a = bool(U[g, f])
            b = g in Nf
            c = left_coset(N, g) <= Nf
            if not a == b == c:
                w = w or {"g": g, "f": f}
    rep.add("normal.coset-order", w is None, w)
    rep.add("normal.coset-partition", sum(len(B) for B in part.blocks) == n)

    up = N.overgroups
    if up is None:
        rep.skip("normal.coset-unions", note=f"more than {LATTICE_CAP} partial subgroups")
    else:
        bad = [sorted(H) for H in up if any(not (B <= H or not (B & H)) for B in part.blocks)]
        rep.add("normal.coset-unions", not bad, bad[:1] or None, note=f"{len(up)} subgroups")

    q, rho = quotient(loc, N)
    wit, k = quotient_word_check(N, q, max_len)
    rep.add("normal.quotient-well-defined", wit is None, wit, bound=k)
    sub = normalizer_sublocality(loc, T)
    # the sublocality is indexed by the sorted elements of N_L(T)
    emb = sorted(loc.normalizer(T))
    restricted = Projection(sub, q, tuple(rho(g) for g in emb))
    r = verify_projection(restricted)
    rep.add("normal.restricted-projection", r.ok, [c.id for c in r.failures][:1] or None)
    return rep


def verify_quotient(loc: Locality, N: PartialNormalSubgroup) -> Report:
    """Quotient locality, its projection, kernel, fibers and images of S_g."""
    q, rho = quotient(loc, N)
    rep = Report(f"quotient ({loc.name}, |N|={len(N)})", meta={"|L/N|": q.n, "|N|": len(N)})
    rep.extend(verify_locality(q), prefix="quotient.")
    rep.extend(verify_projection(rho), prefix="quotient.")
    rep.add("quotient.kernel", rho.kernel() == N.members)
    rep.add("quotient.fibers", rho.fibers() == set(N.cosets.blocks))
    w = next((g for g in np.nonzero(N.up_maximal)[0].tolist()
              if rho.image(loc.sg[g]) != q.sg[rho(g)]), None)
    rep.add("quotient.sg-images", w is None, w)
    return rep
