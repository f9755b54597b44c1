"""Brute-force reference computations on raw permutations.

Nothing here touches the automata, conjugation tables or closure routines of
the package. Elements are permutation tuples; products act on the right, so
``mul(g, h)`` applies g first.
"""
from __future__ import annotations

import itertools
from functools import lru_cache

from localities.group_core import named_example


def mul(g, h):
    return tuple(h[x] for x in g)


def inv(g):
    out = [0] * len(g)
    for i, x in enumerate(g):
        out[x] = i
    return tuple(out)


def conj(x, g):
    return mul(mul(inv(g), x), g)


def conj_set(X, g):
    return frozenset(conj(x, g) for x in X)


def closure(gens, identity):
    out = {identity}
    frontier = [identity]
    gens = list(gens)
    while frontier:
        nxt = []
        for a in frontier:
            for s in gens:
                b = mul(a, s)
                if b not in out:
                    out.add(b)
                    nxt.append(b)
        frontier = nxt
    return frozenset(out)


def subgroups_of(P, identity):
    """Every subgroup of the small group P, as subgroups generated by at most three elements."""
    elems = sorted(P)
    found = set()
    for k in range(4):
        for gens in itertools.combinations(elems, k):
            found.add(closure(gens, identity))
    return found


class BruteLocality:
    """L, the objects and the word domain of a locality built from a permutation group."""

    def __init__(self, group: str, seed: str):
        G, S, meta = named_example(group)
        self.perms = list(G.perms)
        self.identity = self.perms[G.identity]
        self.S = frozenset(self.perms[i] for i in S.members)
        self.meta = {k: frozenset(self.perms[i] for i in v.members)
                     for k, v in meta.items() if hasattr(v, "members")}
        subs = subgroups_of(self.S, self.identity)
        if seed == "sylow":
            delta = {self.S}
        elif seed == "all":
            delta = {H for H in subs if len(H) > 1}
        elif seed == "parabolic":
            delta = {self.S, self.meta["P1"], self.meta["P2"]}
        else:
            raise KeyError(seed)
        # overgroups in S of S-contained conjugates
        while True:
            grown = set(delta)
            for X in delta:
                for g in self.perms:
                    Y = conj_set(X, g)
                    if Y <= self.S:
                        grown |= {H for H in subs if Y <= H}
            if grown == delta:
                break
            delta = grown
        self.delta = frozenset(delta)
        self.L = [g for g in self.perms if (self.S & conj_set(self.S, g)) in self.delta]
        self.L_set = frozenset(self.L)

    def in_domain(self, word) -> bool:
        """Some object is carried through successive conjugations by the word's entries."""
        for P in self.delta:
            ok = True
            for g in word:
                P = conj_set(P, g)
                if P not in self.delta:
                    ok = False
                    break
            if ok:
                return True
        return False

    def product(self, word):
        x = self.identity
        for g in word:
            x = mul(x, g)
        return x

    def s_w(self, word) -> frozenset:
        out = set()
        for s in self.S:
            x = s
            for g in word:
                x = conj(x, g)
                if x not in self.S:
                    break
            else:
                out.add(s)
        return frozenset(out)

    def conj_defined(self, x, g) -> bool:
        return self.in_domain((inv(g), x, g))

    def normal_closure(self, X) -> frozenset:
        """Close under inverses, defined pair products and defined conjugations."""
        cur = set(X) | {self.identity}
        while True:
            new = set(cur)
            new |= {inv(x) for x in cur}
            for a in cur:
                for b in cur:
                    if self.in_domain((a, b)):
                        new.add(mul(a, b))
            for x in cur:
                for g in self.L:
                    if self.conj_defined(x, g):
                        new.add(conj(x, g))
            if new == cur:
                return frozenset(cur)
            cur = new

    def partial_normal_subgroups(self) -> list[frozenset]:
        atoms = {self.normal_closure({g}) for g in self.L}
        found = set(atoms)
        frontier = set(atoms)
        while frontier:
            nxt = set()
            for A in frontier:
                for B in atoms:
                    if not B <= A:
                        J = self.normal_closure(A | B)
                        if J not in found:
                            nxt.add(J)
            found |= nxt
            frontier = nxt
        return sorted(found, key=len)

    def is_closed(self, delta) -> bool:
        """Every subgroup of S over an S-contained L-conjugate of a member is a member."""
        subs = subgroups_of(self.S, self.identity)
        for X in delta:
            for g in self.L:
                Y = conj_set(X, g)
                if Y <= self.S and any(Y <= H and H not in delta for H in subs):
                    return False
        return True

    def s_w_values(self, delta=None) -> frozenset:
        """S_w for every word w whose chain stays in delta, by search over
        (S_w, product of w) pairs."""
        delta = self.delta if delta is None else delta
        start = (self.S, self.identity)
        seen, todo = {start}, [start]
        while todo:
            A, h = todo.pop()
            for g in self.L:
                hg = mul(h, g)
                B = frozenset(x for x in A if conj(x, hg) in self.S)
                if B in delta and (B, hg) not in seen:
                    seen.add((B, hg))
                    todo.append((B, hg))
        return frozenset(A for A, _ in seen)

    def deletion_is_equivalent(self, X) -> bool:
        """Dropping the object X leaves the same domain and a closed object set."""
        rest = self.delta - {X}
        return X not in self.s_w_values() and self.is_closed(rest)

    def op_subgroup(self) -> frozenset:
        """Largest subgroup of S normalized by every element of L."""
        best = frozenset({self.identity})
        for H in subgroups_of(self.S, self.identity):
            if all(conj_set(H, g) == H for g in self.L) and len(H) > len(best):
                best = H
        return best


# zoo instance -> (named group, object seed) for BruteLocality
SOURCES = {
    "S3:delta-C3": ("S3", "sylow"),
    "D8:sylow": ("D8", "sylow"),
    "S4:sylow": ("S4", "sylow"),
    "S4:all": ("S4", "all"),
    "O4plus2:sylow": ("O4plus2", "sylow"),
    "O4plus2:all": ("O4plus2", "all"),
    "GL3_2:parabolic": ("GL3_2", "parabolic"),
    "GL3_2:all": ("GL3_2", "all"),
    "C3xD8:sylow": ("C3xD8", "sylow"),
}


@lru_cache(maxsize=None)
def brute(group: str, seed: str) -> BruteLocality:
    return BruteLocality(group, seed)


def element_map(loc, bl: BruteLocality) -> list:
    """Permutation of each element index of a locality built from the same group."""
    return [bl.perms[g] for g in loc.embed]
