"""Objective partial groups and localities.

A locality carries a p-subgroup S, a set of objects (subgroups of S), and for
each element g the subgroup S_g of elements of S conjugated into S by g,
together with the conjugation map on it.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .automaton import Automaton, explore, first_disagreement, first_rejected, reachable_states
from .group_core import (FiniteGroup, Subgroup, all_subgroups, conjugate_set, is_p_power,
                         p_part)
from .partial_group import (PartialGroupView, binary_closure, is_normal_in,
                            is_partial_subgroup)
from .report import Report


class LocalityError(ValueError):
    pass


def isprime(p: int) -> bool:
    return p >= 2 and all(p % q for q in range(2, int(p ** 0.5) + 1))


def _key(X) -> tuple:
    return (len(X), sorted(X))


@dataclass(frozen=True)
class ObjectSet:
    S: frozenset
    members: frozenset
    p: int

    def __contains__(self, X) -> bool:
        return frozenset(X) in self.members

    def __iter__(self):
        return iter(sorted(self.members, key=_key))

    def __len__(self):
        return len(self.members)


def sw_automaton(n: int, S, sg, conj, accept_set) -> tuple[Automaton, list]:
    """Automaton whose state after a word w records the partial map S_w -> S
    given by successive conjugation; a word is accepted when S_w is in accept_set."""
    start = frozenset((x, x) for x in S)

    def step(lab, g):
        cg, sgg = conj[g], sg[g]
        return frozenset((x0, cg[y]) for x0, y in lab if y in sgg)

    def accepting(lab):
        return frozenset(x0 for x0, _ in lab) in accept_set

    return explore(start, n, step, accepting)


class Locality:
    """A triple (L, Delta, S) over a partial group view.

    ``S`` and the objects are sets of element indices. When ``sg`` is not given
    it is computed by scanning: x in S lies in S_g when (g^-1, x, g) is accepted
    and x^g lies in S.
    """

    def __init__(self, pg: PartialGroupView, S, delta, p: int, *, sg=None, name: str = "",
                 group: FiniteGroup | None = None, embed=None, require_S: bool = True):
        S = frozenset(int(x) for x in S)
        members = frozenset(frozenset(int(x) for x in X) for X in delta)
        if not isprime(p):
            raise LocalityError(f"{p} is not prime")
        if not S or not S <= set(range(pg.n)) or pg.identity not in S:
            raise LocalityError("S must contain the identity and lie in L")
        if not is_p_power(len(S), p):
            raise LocalityError(f"S has order {len(S)}, not a power of {p}")
        if any(not X <= S for X in members):
            raise LocalityError("every object must be a subset of S")
        if require_S and S not in members:
            raise LocalityError("S is not an object")
        self.pg = pg
        self.n = pg.n
        self.identity = pg.identity
        self.inv = pg.inv
        self.p = p
        self.S = S
        self.delta = ObjectSet(S, members, p)
        self.name = name or pg.name
        self.group = group
        self.embed = list(embed) if embed is not None else None
        self.s_sorted = sorted(S)
        if sg is None:
            sg = self.scan_sg()
        self.sg = [frozenset(x) for x in sg]
        rows, inv = pg.pair_rows, pg.inv
        self.conj = []
        for g in range(self.n):
            gi = inv[g]
            cg = {}
            for x in self.sg[g]:
                y = rows[gi][x]
                y = rows[y][g] if y >= 0 else -1
                if y not in S:
                    raise LocalityError(f"conjugate of {x} by {g} is not in S")
                cg[x] = y
            self.conj.append(cg)

    def __repr__(self):
        return f"Locality(name={self.name!r}, |L|={self.n}, |S|={len(self.S)}, |Delta|={len(self.delta)})"

    def scan_sg(self) -> list[frozenset]:
        pg, S = self.pg, self.S
        out = []
        for g in range(self.n):
            gi = pg.inv[g]
            out.append(frozenset(x for x in self.s_sorted
                                 if pg.in_domain((gi, x, g)) and pg.fold((gi, x, g)) in S))
        return out

    # -- derived tables ------------------------------------------------------

    @cached_property
    def sw(self) -> tuple[Automaton, list]:
        return sw_automaton(self.n, self.s_sorted, self.sg, self.conj, self.delta.members)

    @cached_property
    def conj_table(self) -> np.ndarray:
        """C[x, g] = x^g, or -1 where (g^-1, x, g) is not accepted."""
        pg, n = self.pg, self.n
        inv = np.asarray(pg.inv, dtype=np.int64)
        ar = np.arange(n)
        px = pg.pairx
        prod = px[px[inv[None, :], ar[:, None]], ar[None, :]]
        if pg.automaton is not None:
            a = pg.automaton
            s0 = a.trans[a.start, inv]                     # by g
            s1 = a.trans[s0[None, :], ar[:, None]]         # [x, g]
            s2 = a.trans[s1, ar[None, :]]
            acc = a.accept[s2]
        else:
            acc = np.array([[pg.in_domain((pg.inv[g], x, g)) for g in range(n)] for x in range(n)])
        return np.where(acc, prod, -1)

    @cached_property
    def s_group(self) -> tuple[FiniteGroup, list[int]]:
        """S as a standalone group with its embedding into L."""
        emb = self.s_sorted
        pos = {x: i for i, x in enumerate(emb)}
        bad = s_table_failure(self)
        if bad is not None:
            raise LocalityError(f"S is not a group under the product (witness {bad})")
        table = [[pos[self.pg.pair_rows[a][b]] for b in emb] for a in emb]
        return FiniteGroup(table, pos[self.identity], check=False), emb

    @cached_property
    def s_subgroups(self) -> list[frozenset]:
        """All subgroups of S, as sets of element indices of L."""
        G, emb = self.s_group
        return [frozenset(emb[i] for i in H) for H in all_subgroups(G)]

    @cached_property
    def s_subgroup_set(self) -> frozenset:
        return frozenset(self.s_subgroups)

    # -- basic operations ----------------------------------------------------

    def mul(self, f: int, g: int) -> int:
        return self.pg.pair_rows[f][g]

    @cached_property
    def _sw_domains(self) -> list[frozenset]:
        _, labels = self.sw
        return [frozenset(x0 for x0, _ in lab) for lab in labels]

    def s_w(self, word) -> frozenset:
        """Elements of S whose successive conjugates by the entries of word stay in S."""
        aut, _ = self.sw
        return self._sw_domains[aut.run(word)]

    def s_w_direct(self, word) -> frozenset:
        """Same as s_w, computed by pulling back through the conjugation tables."""
        cur = {x: x for x in self.s_sorted}
        for g in word:
            cg, sgg = self.conj[g], self.sg[g]
            cur = {x0: cg[y] for x0, y in cur.items() if y in sgg}
        return frozenset(cur)

    def conj_set(self, X, g: int) -> frozenset:
        cg = self.conj[g]
        return frozenset(cg[x] for x in X)

    def conj_elem(self, x: int, g: int) -> int:
        return int(self.conj_table[x, g])

    def normalizer(self, X) -> frozenset:
        """N_L(X) for X ⊆ S."""
        X = frozenset(X)
        return frozenset(g for g in range(self.n)
                         if X <= self.sg[g] and self.conj_set(X, g) == X)

    def transporter(self, X, Y) -> frozenset:
        X, Y = frozenset(X), frozenset(Y)
        return frozenset(g for g in range(self.n)
                         if X <= self.sg[g] and self.conj_set(X, g) <= Y)

    def normalizer_in_S(self, X) -> frozenset:
        return self.normalizer(X) & self.S

    def set_product(self, X, Y) -> frozenset:
        rows = self.pg.pair_rows
        return frozenset(rows[x][y] for x in X for y in Y if rows[x][y] >= 0)

    def is_p_group(self, H) -> bool:
        return is_p_power(len(H), self.p)

    def as_group(self, H) -> tuple[FiniteGroup, list[int]]:
        """A subgroup of L (every word defined) as a standalone group."""
        emb = sorted(H)
        pos = {x: i for i, x in enumerate(emb)}
        table = [[pos[self.pg.pair_rows[a][b]] for b in emb] for a in emb]
        return FiniteGroup(table, pos[self.identity]), emb

    def summary(self) -> dict:
        return {"|L|": self.n, "|S|": len(self.S), "|Delta|": len(self.delta), "p": self.p}


# -- construction from a finite group -------------------------------------------

def delta_closure(G: FiniteGroup, S, seed, p: int | None = None) -> ObjectSet:
    """Smallest set of subgroups of S containing seed and S that contains every
    subgroup of S lying over a G-conjugate of a member."""
    S = S.members if isinstance(S, Subgroup) else frozenset(S)
    subs = all_subgroups(G, within=S)
    members = {S} | {X.members if isinstance(X, Subgroup) else frozenset(X) for X in seed}
    todo = list(members)
    seen_images = set()
    while todo:
        X = todo.pop()
        for g in range(G.n):
            Z = conjugate_set(G, X, g)
            if Z in seen_images or not Z <= S:
                continue
            seen_images.add(Z)
            for Y in subs:
                if Z <= Y and Y not in members:
                    members.add(Y)
                    todo.append(Y)
    if p is None:
        p = _prime_of(len(S))
    return ObjectSet(S, frozenset(members), p)


def _prime_of(order: int) -> int:
    for q in range(2, order + 1):
        if order % q == 0:
            return q
    raise LocalityError("cannot infer the prime from a trivial S; pass p")


def nonidentity_subgroups(G: FiniteGroup, S) -> list[frozenset]:
    S = S.members if isinstance(S, Subgroup) else frozenset(S)
    return [H for H in all_subgroups(G, within=S) if len(H) > 1]


def locality_from_group(G: FiniteGroup, S, delta, p: int | None = None, name: str = "") -> Locality:
    """L = {g in G : S ∩ S^g is an object}; a word is defined when some chain of
    objects is carried along it by conjugation in G."""
    S = S.members if isinstance(S, Subgroup) else frozenset(S)
    if isinstance(delta, ObjectSet):
        p = p or delta.p
        members = delta.members
    else:
        members = frozenset(X.members if isinstance(X, Subgroup) else frozenset(X) for X in delta)
    if p is None:
        p = _prime_of(len(S))
    if not is_p_power(len(S), p):
        raise LocalityError(f"S has order {len(S)}, not a power of {p}")
    closed = delta_closure(G, S, members, p).members
    if S not in members:
        raise LocalityError("S is not an object")
    if closed != members:
        missing = sorted(closed - members, key=_key)[0]
        raise LocalityError(f"object set not closed: missing subgroup {sorted(missing)}")
    L = [g for g in range(G.n) if (S & conjugate_set(G, S, g)) in members]
    pos = {g: i for i, g in enumerate(L)}
    m = len(L)
    objs = sorted(members, key=_key)
    oidx = {X: i for i, X in enumerate(objs)}
    # image of each object under each element of L, as an object index or -1
    img = [[oidx.get(conjugate_set(G, X, L[g]), -1) for g in range(m)] for X in objs]

    def step(lab, g):
        return frozenset(j for i in lab if (j := img[i][g]) >= 0)

    aut, _ = explore(frozenset(range(len(objs))), m, step, bool)
    pair = np.full((m, m), -1, dtype=np.int64)
    acc2 = aut.accept[aut.trans[aut.trans[aut.start]]]
    for f, g in zip(*np.nonzero(acc2)):
        h = G.mul(L[f], L[g])
        if h not in pos:
            raise LocalityError("product of a defined pair left L")
        pair[f, g] = pos[h]
    inv = [pos[G.inv[g]] for g in L]
    labels = [G.label(g) for g in L]
    pg = PartialGroupView(m, pos[G.identity], inv, pair, automaton=aut, labels=labels,
                          name=name, oracle_name="delta")
    return Locality(pg, [pos[x] for x in S], [[pos[x] for x in X] for X in members], p,
                    name=name, group=G, embed=L)


def locality_from_tables(n: int, identity: int, inv, pair, S, delta, sg, p: int,
                         labels=None, name: str = "") -> Locality:
    """Rebuild a locality from stored tables; the domain is decided by S_w."""
    pair = np.asarray(pair, dtype=np.int64).reshape(n, n)
    rows = pair.tolist()
    sg = [frozenset(x) for x in sg]
    conj = []
    for g in range(n):
        cg = {}
        for x in sg[g]:
            y = rows[inv[g]][x]
            cg[x] = rows[y][g] if y >= 0 else -1
        conj.append(cg)
    members = frozenset(frozenset(X) for X in delta)
    aut, _ = sw_automaton(n, sorted(S), sg, conj, members)
    pg = PartialGroupView(n, identity, inv, pair, automaton=aut, labels=labels, name=name,
                          oracle_name="delta")
    return Locality(pg, S, members, p, sg=sg, name=name)


# -- subgroup tests ---------------------------------------------------------------

def qstar(loc: Locality, H) -> frozenset:
    """Largest subset of ∩_{h in H} S_h mapped into itself by every c_h."""
    H = sorted(H)
    Q = set(loc.S)
    for h in H:
        Q &= loc.sg[h]
    while True:
        nxt = {x for x in Q if all(loc.conj[h][x] in Q for h in H)}
        if nxt == Q:
            return frozenset(Q)
        Q = nxt


def is_subgroup_qstar(loc: Locality, H) -> bool:
    H = frozenset(H)
    return is_partial_subgroup(loc.pg, H) and qstar(loc, H) in loc.delta.members


def is_subgroup_words(loc: Locality, H, max_len: int = 4) -> bool:
    """Every word over H of length <= max_len is accepted (and H is a partial subgroup)."""
    H = sorted(H)
    if not is_partial_subgroup(loc.pg, H):
        return False
    a = loc.pg.automaton
    if a is None:
        return all(loc.pg.in_domain(w) for k in range(max_len + 1)
                   for w in itertools.product(H, repeat=k))
    states = {a.start}
    for _ in range(max_len):
        states = {int(a.trans[s, h]) for s in states for h in H}
        if not all(a.accept[s] for s in states):
            return False
    return True


def enumerate_subgroups(loc: Locality) -> list[frozenset]:
    """Subgroups of L generated by one or two elements, plus object normalizers and
    subgroups of S."""
    pg = loc.pg
    cands = {}
    for g in range(loc.n):
        cands.setdefault(binary_closure(pg, [g]), g)
    singles = [H for H in cands if is_subgroup_qstar(loc, H)]
    found = set(singles)
    for A, B in itertools.combinations(sorted(singles, key=_key), 2):
        if A <= B or B <= A:
            continue
        J = binary_closure(pg, A | B)
        if J not in found and is_subgroup_qstar(loc, J):
            found.add(J)
    for P in loc.delta.members:
        found.add(loc.normalizer(P))
    found.update(loc.s_subgroups)
    return sorted(found, key=_key)


# -- verification -------------------------------------------------------------------

def s_table_failure(loc: Locality):
    """A word over S whose products leave S or break the group laws, or None."""
    S, rows, e = loc.s_sorted, loc.pg.pair_rows, loc.identity
    for a in S:
        for b in S:
            if rows[a][b] not in loc.S:
                return (a, b)
    for a in S:
        if rows[e][a] != a or rows[a][e] != a:
            return (e, a)
        if loc.inv[a] not in loc.S or rows[a][loc.inv[a]] != e:
            return (a, loc.inv[a])
    for a in S:
        ra = rows[a]
        for b in S:
            rab = rows[ra[b]]
            for c in S:
                if rab[c] != ra[rows[b][c]]:
                    return (a, b, c)
    return None


def verify_objectivity(loc: Locality, max_len: int = 3) -> Report:
    pg, n, S = loc.pg, loc.n, loc.S
    members = loc.delta.members
    rep = Report(f"objectivity ({loc.name})", meta=loc.summary())
    bad = s_table_failure(loc)
    if bad is not None:
        rep.fail("objective.S-group", bad)
        rep.skip("objective.remaining", note="S-is-not-a-group")
        return rep
    C = loc.conj_table

    rep.add("objective.sg-table", loc.scan_sg() == loc.sg,
            next((g for g, X in enumerate(loc.scan_sg()) if X != loc.sg[g]), None))

    sw_aut, _ = loc.sw
    if pg.automaton is not None:
        w = first_disagreement(pg.automaton, sw_aut)
        rep.add("objective.domain", w is None, w, bound="exact")
    else:
        w = None
        for k in range(max_len + 1):
            acc = pg.accepted(k)
            states = np.array([sw_aut.start])
            for _ in range(k):
                states = sw_aut.trans[states].reshape(-1)
            diff = np.nonzero(acc != sw_aut.accept[states])[0]
            if len(diff):
                w = _unindex(diff[0], k, n)
                break
        rep.add("objective.domain", w is None, w, bound=max_len)

    # overgroup closure: X in Delta, X^g <= Y in Delta => every subgroup between is in Delta
    w = None
    images = set()
    for X in members:
        for g in range(n):
            if X <= loc.sg[g]:
                images.add(loc.conj_set(X, g))
    for Z in sorted(images, key=_key):
        for Y in members:
            if Z <= Y:
                for K in loc.s_subgroups:
                    if Z <= K <= Y and K not in members:
                        w = w or {"image": sorted(Z), "object": sorted(Y), "missing": sorted(K)}
    rep.add("objective.overgroup-closure", w is None, w)

    subs = loc.s_subgroup_set
    bad = [g for g in range(n) if loc.sg[g] not in members or loc.sg[g] not in subs]
    rep.add("objective.sg-object", not bad, bad[:1] or None)

    w = None
    rows = pg.pair_rows
    for g in range(n):
        cg, X = loc.conj[g], loc.sg[g]
        gi = loc.inv[g]
        if frozenset(cg.values()) != loc.sg[gi] or len(set(cg.values())) != len(X):
            w = w or {"g": g, "issue": "image"}
        elif any(loc.conj[gi][cg[x]] != x for x in X):
            w = w or {"g": g, "issue": "inverse"}
        else:
            for x in X:
                for y in X:
                    xy = rows[x][y]
                    if xy < 0 or cg.get(xy) != rows[cg[x]][cg[y]]:
                        w = w or {"g": g, "x": x, "y": y}
                        break
    rep.add("objective.sg-conjugation", w is None, w)

    w = None
    for g in range(n):
        for P in loc.s_subgroups:
            if P <= loc.sg[g] and loc.conj_set(P, g) not in subs:
                w = w or {"g": g, "P": sorted(P)}
    rep.add("objective.sg-subgroup-images", w is None, w)

    norms = {X: loc.normalizer(X) for X in members}
    w = None
    for X, N in sorted(norms.items(), key=lambda t: _key(t[0])):
        if not is_partial_subgroup(pg, N):
            w = w or {"object": sorted(X), "issue": "not-closed"}
        elif pg.automaton is not None:
            r = first_rejected(pg.automaton, N)
            if r is not None:
                w = w or {"object": sorted(X), "word": r}
        elif not is_subgroup_words(loc, N, max_len):
            w = w or {"object": sorted(X), "issue": "word-rejected"}
    rep.add("objective.normalizer-subgroup", w is None, w)

    w = None
    for X, N in sorted(norms.items(), key=lambda t: _key(t[0])):
        Nl = sorted(N)
        for g in range(n):
            if not X <= loc.sg[g]:
                continue
            Y = loc.conj_set(X, g)
            if Y not in members:
                continue
            imgs = C[Nl, g]
            if (imgs < 0).any():
                w = w or {"object": sorted(X), "g": g, "issue": "undefined"}
                continue
            imap = dict(zip(Nl, imgs.tolist()))
            if set(imap.values()) != norms[Y] or len(set(imap.values())) != len(Nl):
                w = w or {"object": sorted(X), "g": g, "issue": "image"}
                continue
            for a in Nl:
                ra = rows[a]
                for b in Nl:
                    if imap.get(ra[b]) != rows[imap[a]][imap[b]]:
                        w = w or {"object": sorted(X), "g": g, "x": a, "y": b}
                        break
    rep.add("objective.normalizer-conjugation", w is None, w)

    # composite conjugation along defined words of length 2 (3 when small)
    w = None
    kmax = 3 if n ** 3 <= 400_000 and max_len >= 3 else 2
    for k in range(2, kmax + 1):
        for word in _accepted_words(pg, k):
            X0 = loc.s_w(word)
            if X0 not in members:
                w = w or {"word": word, "issue": "s_w-not-object"}
                continue
            prod = pg.fold(word)
            for h in sorted(norms.get(X0) or loc.normalizer(X0)):
                x = h
                for g in word:
                    x = int(C[x, g]) if x >= 0 else -1
                if x < 0 or x != C[h, prod]:
                    w = w or {"word": word, "x": h}
                    break
        if w:
            break
    rep.add("objective.composite-conjugation", w is None, w, bound=kmax)

    # X^{fg} = (X^f)^g when both sides are objects
    w = None
    for f in range(n):
        for g in range(n):
            fg = rows[f][g]
            if fg < 0:
                continue
            for X in members:
                if X <= loc.sg[f] and X <= loc.sg[fg]:
                    Xf = loc.conj_set(X, f)
                    if Xf in members and loc.conj_set(X, fg) in members:
                        if not Xf <= loc.sg[g] or loc.conj_set(Xf, g) != loc.conj_set(X, fg):
                            w = w or {"f": f, "g": g, "X": sorted(X)}
    rep.add("objective.conjugate-of-product", w is None, w)

    # f^g = f  =>  fg = gf and g^f = g
    pair = pg.pair
    ar = np.arange(n)
    fixed = C == ar[:, None]
    bad = fixed & ((pair < 0) | (pair != pair.T) | (C.T != ar[None, :]))
    idx = np.argwhere(bad)
    rep.add("objective.commuting", not len(idx),
            None if not len(idx) else {"f": int(idx[0][0]), "g": int(idx[0][1])})

    # N_L(S)-biset: (x) o u o (y) in D for u in D
    w = None
    NS = sorted(norms.get(S) or loc.normalizer(S))
    ulen = max(1, max_len - 2)
    for k in range(1, ulen + 1):
        for u in _accepted_words(pg, k):
            for x in NS:
                for y in NS:
                    if not pg.in_domain((x,) + u + (y,)):
                        w = w or {"x": x, "u": u, "y": y}
                        break
                if w:
                    break
            if w:
                break
    rep.add("objective.biset", w is None, w, bound=ulen + 2)

    # chains started at S_w stay inside Delta
    w = None
    for k in range(1, kmax + 1):
        for word in _accepted_words(pg, k):
            X = loc.s_w(word)
            for g in word:
                if not X <= loc.sg[g]:
                    w = w or {"word": word}
                    break
                X = loc.conj_set(X, g)
                if X not in members:
                    w = w or {"word": word}
                    break
    rep.add("objective.chain-in-objects", w is None, w, bound=kmax)
    return rep


def _unindex(i: int, k: int, n: int) -> tuple:
    out = []
    for _ in range(k):
        i, r = divmod(int(i), n)
        out.append(r)
    return tuple(reversed(out))


def _accepted_words(pg: PartialGroupView, k: int):
    acc = pg.accepted(k)
    for i in np.nonzero(acc)[0]:
        yield _unindex(i, k, pg.n)


def op_subgroup(loc: Locality) -> frozenset:
    """Largest subgroup of S carried onto itself by every conjugation map."""
    Y = set(loc.S)
    for g in range(loc.n):
        Y &= loc.sg[g]
    while True:
        nxt = {x for x in Y if all(loc.conj[g][x] in Y for g in range(loc.n))}
        if nxt == Y:
            return frozenset(Y)
        Y = nxt


def op_subgroup_bruteforce(loc: Locality) -> frozenset:
    inv_subs = [X for X in loc.s_subgroups
                if all(X <= loc.sg[g] and loc.conj_set(X, g) == X for g in range(loc.n))]
    if not inv_subs:
        raise LocalityError("no subgroup of S is invariant")
    best = max(inv_subs, key=len)
    if any(not X <= best for X in inv_subs):
        raise LocalityError("invariant subgroups of S have no largest member")
    return best


def op_subgroup_from_words(loc: Locality) -> frozenset:
    """Intersection of S_w over all words, read off the reachable S_w states."""
    aut, labels = loc.sw
    out = set(loc.S)
    for s in reachable_states(aut):
        out &= {x0 for x0, _ in labels[s]}
    return frozenset(out)


def is_sylow_in_normalizer(loc: Locality, P) -> bool:
    """N_S(P) has full p-part in N_L(P)."""
    N = loc.normalizer(P)
    return len(N & loc.S) == p_part(len(N), loc.p)


def conjugate_into_S(loc: Locality, H) -> int:
    """An element g with H^g ⊆ S, for a p-subgroup H of L.

    Route: an object U normalized by H, then an element moving U to an object
    whose normalizer has N_S as a Sylow subgroup, then a Sylow step in that group.
    """
    H = frozenset(H)
    if not is_subgroup_qstar(loc, H):
        raise LocalityError("not a subgroup of L")
    if not loc.is_p_group(H):
        raise LocalityError("not a p-subgroup")
    if H <= loc.S:
        return loc.identity
    U = qstar(loc, H)
    NSU = loc.normalizer_in_S(U)
    g = next(g for g in range(loc.n)
             if NSU <= loc.sg[g] and is_sylow_in_normalizer(loc, loc.conj_set(U, g)))
    V = loc.conj_set(U, g)
    C = loc.conj_table
    K = frozenset(int(C[h, g]) for h in H)
    NV = loc.normalizer(V)
    NSV = NV & loc.S
    x = next(x for x in sorted(NV) if all(0 <= C[k, x] and int(C[k, x]) in NSV for k in K))
    gx = loc.mul(g, x)
    if gx < 0 or any(C[h, gx] < 0 or int(C[h, gx]) not in loc.S for h in H):
        raise LocalityError("conjugation into S failed")
    return gx


def centralizer_partial(loc: Locality, T) -> frozenset:
    T = frozenset(T)
    return frozenset(g for g in range(loc.n)
                     if T <= loc.sg[g] and all(loc.conj[g][t] == t for t in T))


def verify_locality(loc: Locality) -> Report:
    rep = Report(f"locality ({loc.name})", meta=loc.summary())
    S, members = loc.S, loc.delta.members
    bad = s_table_failure(loc)
    if bad is not None:
        rep.fail("locality.S-subgroup", bad)
        rep.skip("locality.remaining", note="S-is-not-a-group")
        return rep
    rep.add("locality.S-object", S in members, sorted(S))
    rep.add("locality.objects-in-S", all(X <= S and X in loc.s_subgroup_set for X in members),
            next((sorted(X) for X in members if X not in loc.s_subgroup_set), None))
    w = first_rejected(loc.pg.automaton, S) if loc.pg.automaton is not None else None
    rep.add("locality.S-subgroup", w is None and loc.is_p_group(S), w)
    NS = loc.normalizer(S)
    rep.add("locality.S-maximal", S <= NS and len(S) == p_part(len(NS), loc.p),
            {"|N_L(S)|": len(NS), "|S|": len(S)})

    subgroups = enumerate_subgroups(loc)
    rep.meta["subgroups-enumerated"] = len(subgroups)
    w = None
    for H in subgroups:
        if not any(H <= loc.normalizer(P) for P in sorted(members, key=_key)):
            w = w or sorted(H)
    rep.add("locality.local-subgroups", w is None, w)

    w = None
    C = loc.conj_table
    for H in subgroups:
        if not loc.is_p_group(H):
            continue
        Hl = sorted(H)
        try:
            g = conjugate_into_S(loc, H)
        except (LocalityError, StopIteration):
            w = w or {"H": Hl, "issue": "search-failed"}
            continue
        if any(C[h, g] < 0 or int(C[h, g]) not in S for h in Hl):
            w = w or {"H": Hl, "g": g}
    rep.add("locality.sylow-conjugation", w is None, w)

    w = None
    for P in sorted(members, key=_key):
        NSP = loc.normalizer_in_S(P)
        if not any(NSP <= loc.sg[g] and is_sylow_in_normalizer(loc, loc.conj_set(P, g))
                   for g in range(loc.n)):
            w = w or sorted(P)
    rep.add("locality.sylow-normalizer", w is None, w)

    op = op_subgroup(loc)
    try:
        scan = op_subgroup_bruteforce(loc)
    except LocalityError:
        scan = None
    routes = {"fixpoint": op, "invariant-scan": scan, "words": op_subgroup_from_words(loc)}
    rep.add("locality.op-routes-agree", scan is not None and len(set(routes.values())) == 1,
            {k: "no-largest" if v is None else sorted(v) for k, v in routes.items()})
    normal_in_S = [X for X in loc.s_subgroups if is_normal_in(loc.pg, X)]
    rep.add("locality.op-largest-normal",
            is_normal_in(loc.pg, op) and all(X <= op for X in normal_in_S),
            sorted(op))
    return rep


# -- normalizer sublocalities ------------------------------------------------------

def sublocality(loc: Locality, H, S, delta, name: str = "") -> Locality:
    """Restrict to the partial subgroup H with new Sylow S and objects delta."""
    H = sorted(H)
    pos = {h: i for i, h in enumerate(H)}
    m = len(H)
    pair = loc.pg.pair[np.ix_(H, H)]
    pair = np.vectorize(lambda v: pos.get(int(v), -1) if v >= 0 else -1, otypes=[np.int64])(pair) \
        if m else pair
    if ((loc.pg.pair[np.ix_(H, H)] >= 0) & (pair < 0)).any():
        raise LocalityError("H is not closed under the product")
    inv = [pos[loc.inv[h]] for h in H]
    aut = loc.pg.automaton.relabel(H) if loc.pg.automaton is not None else None
    kw = {"automaton": aut} if aut is not None else {
        "oracle": lambda w: loc.pg.in_domain(tuple(H[i] for i in w))}
    labels = [loc.pg.label(h) for h in H]
    pg = PartialGroupView(m, pos[loc.identity], inv, pair, labels=labels, name=name,
                          oracle_name="delta", **kw)
    embed = [loc.embed[h] for h in H] if loc.embed is not None else None
    return Locality(pg, [pos[x] for x in S], [[pos[x] for x in X] for X in delta], loc.p,
                    name=name, group=loc.group, embed=embed), H


def normalizer_sublocality(loc: Locality, R) -> Locality:
    """N_L(R) with objects N_P(R); requires those to be objects of L."""
    R = frozenset(R)
    if not R <= loc.S:
        raise LocalityError("R must lie in S")
    gamma = {loc.normalizer_in_S(R) & P for P in loc.delta.members}
    if not gamma <= loc.delta.members:
        bad = sorted(gamma - loc.delta.members, key=_key)[0]
        raise LocalityError(f"hypothesis failed: N_P(R) = {sorted(bad)} is not an object")
    NR = loc.normalizer(R)
    sub, _ = sublocality(loc, NR, loc.normalizer_in_S(R), gamma, name=f"{loc.name}/N({len(R)})")
    return sub


# -- fusion maps ------------------------------------------------------------------

@dataclass(frozen=True)
class FusionMapSet:
    """Injective maps between subgroups of S, each stored as the frozenset of
    (x, image) pairs."""
    S: frozenset
    maps: frozenset = field(repr=False)

    def __len__(self):
        return len(self.maps)

    def translate(self, f) -> "FusionMapSet":
        """Rename elements through the bijection f."""
        return FusionMapSet(frozenset(f[x] for x in self.S),
                            frozenset(frozenset((f[x], f[y]) for x, y in m) for m in self.maps))


def fusion_maps(loc: Locality) -> FusionMapSet:
    subs = loc.s_subgroups
    maps = set()
    for g in range(loc.n):
        cg = loc.conj[g]
        for P in subs:
            if P <= loc.sg[g]:
                maps.add(frozenset((x, cg[x]) for x in P))
    subs_of = {P: [Q for Q in subs if Q <= P] for P in subs}
    maps = _close_maps(maps, subs_of)
    return FusionMapSet(loc.S, frozenset(maps))


def _close_maps(seed: set, subs_of: dict) -> set:
    """Close under inversion, restriction to subgroups and composition."""
    maps: set = set()
    by_dom: dict = {}
    by_img: dict = {}
    todo = list(seed)
    while todo:
        m = todo.pop()
        if m in maps:
            continue
        maps.add(m)
        d = dict(m)
        dom, img = frozenset(d), frozenset(d.values())
        by_dom.setdefault(dom, []).append(m)
        by_img.setdefault(img, []).append(m)
        todo.append(frozenset((y, x) for x, y in m))
        todo.extend(frozenset((x, d[x]) for x in Q) for Q in subs_of.get(dom, ()))
        # m then m2 where img(m) <= dom(m2); m2 then m where img(m2) <= dom
        for dom2, ms in list(by_dom.items()):
            if img <= dom2:
                for m2 in ms:
                    d2 = dict(m2)
                    todo.append(frozenset((x, d2[y]) for x, y in d.items()))
        for img2, ms in list(by_img.items()):
            if img2 <= dom:
                for m2 in ms:
                    todo.append(frozenset((x, d[y]) for x, y in m2))
    return maps
