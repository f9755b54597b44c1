"""Partial groups: a product defined on a domain of words, given by a pair table
plus a word-domain oracle. Products of longer words are left folds of the pair table.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .automaton import (Automaton, explore, first_rejected, product_automaton,
                        trivial_automaton)
from .group_core import FiniteGroup
from .report import Report

Word = tuple

LEVEL_CAP = 60_000_000


class DomainError(ValueError):
    """A word outside the domain was evaluated."""

    def __init__(self, word, msg: str = "word not in domain"):
        self.word = tuple(word)
        super().__init__(f"{msg}: {self.word}")


class PartialGroupError(ValueError):
    pass


class PartialGroupView:
    """Elements are 0..n-1. ``pair[f, g]`` is the product or -1 where undefined.

    The domain is decided by ``automaton`` when given, else by ``oracle``.
    """

    def __init__(self, n: int, identity: int, inv, pair, *, automaton: Automaton | None = None,
                 oracle=None, labels=None, name: str = "", oracle_name: str | None = None,
                 nary=None, table_words=None, table_maxlen: int | None = None, check: bool = True):
        if n < 1:
            raise PartialGroupError("a partial group needs at least one element")
        if automaton is None and oracle is None:
            raise PartialGroupError("no domain oracle given")
        self.n = n
        self.identity = identity
        self.inv = [int(x) for x in inv]
        self.pair = np.asarray(pair, dtype=np.int64).reshape(n, n)
        self.pair_rows = self.pair.tolist()
        px = np.full((n + 1, n + 1), -1, dtype=np.int64)
        px[:n, :n] = self.pair
        self.pairx = px
        self._inv_arr = np.asarray(self.inv, dtype=np.int64)
        self.automaton = automaton
        self._oracle = oracle
        self.labels = list(labels) if labels is not None else None
        self.name = name
        self.oracle_name = oracle_name
        self.table_words = table_words
        self.table_maxlen = table_maxlen
        if check:
            self._validate(nary)

    def _validate(self, nary):
        n, e, inv = self.n, self.identity, self.inv
        if not 0 <= e < n or len(inv) != n:
            raise PartialGroupError("identity or inversion table out of range")
        if any(not 0 <= inv[g] < n or inv[inv[g]] != g for g in range(n)):
            raise PartialGroupError("inversion is not an involution")
        if inv[e] != e:
            raise PartialGroupError("inverse of the identity is not the identity")
        if not self.in_domain(()):
            raise PartialGroupError("empty word rejected")
        for g in range(n):
            if not self.in_domain((g,)):
                raise PartialGroupError(f"length-1 word ({g},) rejected")
        if ((self.pair < -1) | (self.pair >= n)).any():
            raise PartialGroupError("pair table entry out of range")
        acc2 = self.accepted(2).reshape(n, n)
        bad = np.argwhere(acc2 != (self.pair >= 0))
        if len(bad):
            f, g = bad[0]
            raise PartialGroupError(f"oracle and pair table disagree at ({f}, {g})")
        if nary is not None:
            for k in range(4):
                for w in itertools.product(range(n), repeat=k):
                    if self.in_domain(w) and self.fold(w) != nary(w):
                        raise PartialGroupError(f"fold disagrees with the n-ary product at {w}")

    def __repr__(self):
        return f"PartialGroupView(n={self.n}, name={self.name!r})"

    def __len__(self):
        return self.n

    def label(self, g: int) -> str:
        return self.labels[g] if self.labels else str(g)

    # -- domain and products ----------------------------------------------

    def in_domain(self, word) -> bool:
        if self.automaton is not None:
            return self.automaton.accepts(word)
        return bool(self._oracle(tuple(word)))

    def oracle(self, word) -> bool:
        return self.in_domain(word)

    def fold(self, word) -> int:
        """Left fold of the pair table; -1 if some step is undefined."""
        x = self.identity
        rows = self.pair_rows
        for g in word:
            x = rows[x][g]
            if x < 0:
                return -1
        return x

    def product(self, word) -> int:
        word = tuple(word)
        if not self.in_domain(word):
            raise DomainError(word)
        x = self.fold(word)
        if x < 0:
            raise DomainError(word, "fold undefined on an accepted word")
        return x

    def mul(self, f: int, g: int) -> int:
        """Pair product, -1 if undefined."""
        return self.pair_rows[f][g]

    def conjugate(self, x: int, g: int) -> int:
        """x^g, defined when (g^-1, x, g) is in the domain."""
        return self.product((self.inv[g], x, g))

    def conj_or_none(self, x: int, g: int):
        w = (self.inv[g], x, g)
        return self.fold(w) if self.in_domain(w) else None

    def d_of(self, g: int) -> frozenset:
        gi = self.inv[g]
        return frozenset(x for x in range(self.n) if self.in_domain((gi, x, g)))

    def inverse_word(self, word) -> tuple:
        return tuple(self.inv[g] for g in reversed(word))

    # -- vectorized word enumeration ---------------------------------------

    def accepted(self, k: int) -> np.ndarray:
        """Boolean acceptance over all words of length k in lexicographic index order."""
        if self.automaton is not None:
            a = self.automaton
            states = np.array([a.start])
            for _ in range(k):
                states = a.trans[states].reshape(-1)
            return a.accept[states]
        return np.fromiter((self._oracle(w) for w in itertools.product(range(self.n), repeat=k)),
                           dtype=bool, count=self.n ** k)

    def levels(self, max_len: int) -> "WordLevels":
        return WordLevels(self, max_len)


class WordLevels:
    """Acceptance and folded products of every word of length <= max_len.

    Word (g1,...,gk) sits at index sum(g_i * n**(k-i)).
    """

    def __init__(self, pg: PartialGroupView, max_len: int):
        n = pg.n
        if n ** max_len > LEVEL_CAP:
            raise ValueError(f"{n}**{max_len} words exceed the enumeration cap")
        self.pg, self.n, self.max_len = pg, n, max_len
        self.acc = [np.array([True])]
        self.prod = [np.array([pg.identity], dtype=np.int64)]
        aut = pg.automaton
        states = np.array([aut.start]) if aut is not None else None
        for k in range(1, max_len + 1):
            self.prod.append(pg.pairx[self.prod[-1]][:, :n].reshape(-1))
            if aut is not None:
                states = aut.trans[states].reshape(-1)
                self.acc.append(aut.accept[states])
            else:
                self.acc.append(pg.accepted(k))

    def word(self, index: int, k: int) -> tuple:
        out = []
        for _ in range(k):
            index, r = divmod(int(index), self.n)
            out.append(r)
        return tuple(reversed(out))

    def index(self, word) -> int:
        i = 0
        for g in word:
            i = i * self.n + g
        return i

    def inverse_index(self, k: int) -> np.ndarray:
        """Index of the inverse word, for each word of length k."""
        n = self.n
        if k == 0:
            return np.zeros(1, dtype=np.int64)
        digits = np.indices((n,) * k).reshape(k, -1)
        inv = np.asarray(self.pg.inv, dtype=np.int64)
        rev = inv[digits[::-1]]
        idx = np.zeros(n ** k, dtype=np.int64)
        for d in rev:
            idx = idx * n + d
        return idx


def _first(mask: np.ndarray):
    flat = mask.reshape(-1)
    if not flat.any():
        return None
    return int(np.argmax(flat))


def verify_partial_group(pg: PartialGroupView, max_len: int = 4) -> Report:
    """Exhaustive check of the partial-group axioms and their standard consequences
    over all words of length <= max_len. Checks whose constructed words would be
    longer than max_len are restricted to the inputs that fit."""
    if max_len < 2:
        raise ValueError("max_len must be at least 2")
    K = max_len
    lv = pg.levels(K)
    n, acc, prod, px = pg.n, lv.acc, lv.prod, pg.pairx
    inv = np.asarray(pg.inv, dtype=np.int64)
    e = pg.identity
    rep = Report(f"partial group axioms ({pg.name or 'view'})", meta={"n": n, "bound": K})
    P = lambda k: n ** k  # noqa: E731

    def ok_or(id_, found):
        if found is None:
            rep.add(id_, True, bound=K)
        else:
            rep.fail(id_, found, bound=K)

    # short words
    w = None
    if not acc[1].all():
        w = (int(np.argmin(acc[1])),)
    elif prod[0][0] != e or not np.array_equal(prod[1], np.arange(n)):
        w = ("product-of-short-word",)
    ok_or("axiom.short-words", w)

    w = None
    bad = _first(acc[2] != (pg.pair.reshape(-1) >= 0))
    if bad is not None:
        w = lv.word(bad, 2)
    ok_or("axiom.pair-table", w)

    w = None
    for k in range(2, K + 1):
        i = _first(acc[k] & (prod[k] < 0))
        if i is not None:
            w = lv.word(i, k)
            break
    ok_or("axiom.fold-defined", w)

    w = None
    for k in range(1, K + 1):
        a = acc[k]
        bad = (a.reshape(P(k - 1), n) & ~acc[k - 1][:, None]).reshape(-1)
        bad |= (a.reshape(n, P(k - 1)) & ~acc[k - 1][None, :]).reshape(-1)
        i = _first(bad)
        if i is not None:
            w = lv.word(i, k)
            break
    ok_or("axiom.segment-closure", w)

    # u o v o x in D  =>  u o (Pv) o x in D with the same product
    w = None
    for k in range(0, K + 1):
        for a in range(k + 1):
            for b in range(0, k - a + 1):
                c = k - a - b
                if b == 1 or (b == 0 and k + 1 > K):
                    continue
                A = acc[k].reshape(P(a), P(b), P(c))
                Pk = prod[k].reshape(P(a), P(b), P(c))
                pv = prod[b].reshape(1, P(b), 1)
                m = a + 1 + c
                idx = (np.arange(P(a)).reshape(-1, 1, 1) * P(1 + c)
                       + np.maximum(pv, 0) * P(c) + np.arange(P(c)).reshape(1, 1, -1))
                bad = A & ((pv < 0) | ~acc[m][idx] | (prod[m][idx] != Pk))
                i = _first(bad)
                if i is not None:
                    wd = lv.word(i, k)
                    w = {"word": wd, "split": (a, b, c)}
                    break
            if w:
                break
        if w:
            break
    ok_or("axiom.evaluate-segment", w)

    w = None
    for m in range(1, K // 2 + 1):
        ii = lv.inverse_index(m)
        idx = ii * P(m) + np.arange(P(m))
        bad = acc[m] & (~acc[2 * m][idx] | (prod[2 * m][idx] != e))
        i = _first(bad)
        if i is not None:
            w = lv.word(i, m)
            break
    ok_or("axiom.inverse-word", w)

    # D-multiplicativity
    w = None
    for k in range(2, K + 1):
        for a in range(1, k):
            A = acc[k].reshape(P(a), P(k - a))
            pp = px[prod[a][:, None], prod[k - a][None, :]]
            bad = A & ((pp < 0) | (pp != prod[k].reshape(P(a), P(k - a))))
            i = _first(bad)
            if i is not None:
                w = lv.word(i, k)
                break
        if w:
            break
    ok_or("calculus.multiplicative", w)

    # D-associativity
    w = None
    for k in range(3, K + 1):
        for a in range(1, k - 1):
            for b in range(1, k - a):
                c = k - a - b
                A = acc[k].reshape(P(a), P(b), P(c))
                uv = prod[a + b].reshape(P(a), P(b), 1)
                vw = prod[b + c].reshape(1, P(b), P(c))
                lhs = px[uv, prod[c].reshape(1, 1, -1)]
                rhs = px[prod[a].reshape(-1, 1, 1), vw]
                i = _first(A & ((lhs != rhs) | (lhs < 0)))
                if i is not None:
                    w = lv.word(i, k)
                    break
            if w:
                break
        if w:
            break
    ok_or("calculus.associative", w)

    # inserting the identity
    w = None
    for k in range(0, K):
        for a in range(k + 1):
            c = k - a
            A = acc[k].reshape(P(a), P(c))
            idx = (np.arange(P(a))[:, None] * P(1 + c) + e * P(c) + np.arange(P(c))[None, :])
            bad = A & (~acc[k + 1][idx] | (prod[k + 1][idx] != prod[k].reshape(P(a), P(c))))
            i = _first(bad)
            if i is not None:
                w = lv.word(i, k)
                break
        if w:
            break
    ok_or("calculus.insert-identity", w)

    # u o v in D => u^-1 o u o v in D with product P(v); mirrored on the right
    w = None
    for k in range(1, K + 1):
        for a in range(1, k + 1):
            if 2 * a + (k - a) > K:
                continue
            b = k - a
            A = acc[k].reshape(P(a), P(b))
            ii = lv.inverse_index(a)
            idx = (ii[:, None] * P(a) + np.arange(P(a))[:, None]) * P(b) + np.arange(P(b))[None, :]
            m = 2 * a + b
            bad = A & (~acc[m][idx] | (prod[m][idx] != prod[b][None, :]))
            jj = lv.inverse_index(b) if b else np.zeros(1, dtype=np.int64)
            idx2 = (np.arange(P(a))[:, None] * P(b) + np.arange(P(b))[None, :]) * P(b) + jj[None, :]
            m2 = a + 2 * b
            if m2 <= K:
                bad |= A & (~acc[m2][idx2] | (prod[m2][idx2] != prod[a][:, None]))
            i = _first(bad)
            if i is not None:
                w = lv.word(i, k)
                break
        if w:
            break
    ok_or("calculus.prepend-inverse", w)

    # cancellation and uncancellation, both sides
    w_c = w_u = None
    for side in ("left", "right"):
        for a in range(1, K):
            U, X, Y, src = [], [], [], []
            for b in range(0, K - a + 1):
                k = a + b
                if side == "left":
                    A = acc[k].reshape(P(a), P(b))
                    ui, vi = np.nonzero(A)
                    xy = prod[k].reshape(P(a), P(b))[ui, vi]
                else:
                    A = acc[k].reshape(P(b), P(a))
                    vi, ui = np.nonzero(A)
                    xy = prod[k].reshape(P(b), P(a))[vi, ui]
                U.append(ui)
                X.append(xy)
                Y.append(prod[b][vi])
                src.append(np.stack([np.full(len(ui), b), vi]))
            U, X, Y = np.concatenate(U), np.concatenate(X), np.concatenate(Y)
            src = np.concatenate(src, axis=1)
            # undefined folds are reported by axiom.fold-defined
            keep = (X >= 0) & (Y >= 0)
            U, X, Y, src = U[keep], X[keep], Y[keep], src[:, keep]
            for kind, key, val in (("cancel", U * n + X, Y), ("uncancel", U * n + Y, X)):
                if (kind == "cancel" and w_c) or (kind == "uncancel" and w_u):
                    continue
                uniq = np.unique(key * n + val)
                ks = uniq // n
                clash = np.nonzero(ks[1:] == ks[:-1])[0]
                if len(clash):
                    k0 = ks[clash[0]]
                    v0, v1 = uniq[clash[0]] % n, uniq[clash[0] + 1] % n
                    j0 = int(np.nonzero((key == k0) & (val == v0))[0][0])
                    j1 = int(np.nonzero((key == k0) & (val == v1))[0][0])
                    u = lv.word(U[j0], a)
                    v = lv.word(src[1, j0], src[0, j0])
                    v2 = lv.word(src[1, j1], src[0, j1])
                    found = {"side": side, "u": u, "v": v, "w": v2}
                    if kind == "cancel":
                        w_c = found
                    else:
                        w_u = found
    ok_or("calculus.cancellation", w_c)
    ok_or("calculus.uncancellation", w_u)

    w = None
    for k in range(1, K + 1):
        ii = lv.inverse_index(k)
        bad = acc[k] & (~acc[k][ii] | (prod[k][ii] != inv[np.maximum(prod[k], 0)]))
        i = _first(bad)
        if i is not None:
            w = lv.word(i, k)
            break
    ok_or("calculus.inverse-of-product", w)

    if K >= 3:
        _check_conjugation(pg, lv, rep)
    else:
        rep.skip("conjugation", "bound-below-3")
    return rep


def _check_conjugation(pg, lv, rep):
    """Conjugation and commuting facts that only need words of length 3."""
    n, e = pg.n, pg.identity
    inv = np.asarray(pg.inv, dtype=np.int64)
    acc3, prod3 = lv.acc[3], lv.prod[3]
    f = np.arange(n)[:, None]     # conjugated element
    g = np.arange(n)[None, :]     # conjugating element
    cidx = (inv[g] * n + f) * n + g
    inD = acc3[cidx]                        # f in D(g)
    fg = prod3[cidx]                        # f^g
    pair = pg.pair
    # 1 in D(g), 1^g = 1
    bad = ~inD[e] | (fg[e] != e)
    i = _first(bad)
    rep.add("conjugation.identity", i is None, None if i is None else (e, i), bound=3)
    # x^-1 in D(g), (x^-1)^g = (x^g)^-1
    bad = inD & (~inD[inv] | (fg[inv] != inv[np.maximum(fg, 0)]))
    i = _first(bad)
    rep.add("conjugation.inverse", i is None,
            None if i is None else {"x": i // n, "g": i % n}, bound=3)
    # c_g : D(g) -> D(g^-1) bijective with inverse c_{g^-1}
    y = np.maximum(fg, 0)
    gi = np.broadcast_to(inv[g], (n, n))
    back_in = inD[y, gi]
    back = fg[y, gi]
    bad = inD & (~back_in | (back != f))
    i = _first(bad)
    rep.add("conjugation.bijection", i is None,
            None if i is None else {"x": i // n, "g": i % n}, bound=3)
    bad = ~inD[:, e] | (fg[:, e] != np.arange(n))
    i = _first(bad)
    rep.add("conjugation.by-identity", i is None, None if i is None else (i, e), bound=3)
    # commuting: fg, gf defined and equal with f in D(g)  =>  f^g = f
    both = (pair >= 0) & (pair.T >= 0) & (pair == pair.T)
    bad = both & inD & (fg != f)
    i = _first(bad)
    rep.add("commuting.from-products", i is None,
            None if i is None else {"f": i // n, "g": i % n}, bound=3)
    # f in D(g), g in D(f), f^g = f  =>  fg = gf and g^f = g
    bad = inD & inD.T & (fg == f) & ((pair != pair.T) | (pair < 0) | (fg.T != g))
    i = _first(bad)
    rep.add("commuting.from-conjugates", i is None,
            None if i is None else {"f": i // n, "g": i % n}, bound=3)


# -- generation and subgroups ---------------------------------------------

@dataclass(frozen=True)
class PartialSubgroup:
    parent: PartialGroupView = field(compare=False, hash=False, repr=False)
    members: frozenset

    def __len__(self):
        return len(self.members)

    def __contains__(self, g):
        return g in self.members

    def __iter__(self):
        return iter(sorted(self.members))


def binary_closure(pg: PartialGroupView, X, base=frozenset()) -> frozenset:
    """Close X ∪ X^-1 ∪ {1} under defined pair products.

    ``base`` may name a set already known to be closed; only products involving
    new elements are then formed.
    """
    n, px = pg.n, pg.pairx
    inv = pg._inv_arr
    cur = np.zeros(n + 1, dtype=bool)
    cur[list(base)] = True
    new = np.zeros(n + 1, dtype=bool)
    new[[pg.identity, *X]] = True
    new[inv[np.nonzero(new[:n])[0]]] = True
    new &= ~cur
    while new.any():
        cur |= new
        a, c = np.nonzero(new[:n])[0], np.nonzero(cur[:n])[0]
        found = np.zeros(n + 1, dtype=bool)
        found[px[np.ix_(a, c)]] = True
        found[px[np.ix_(c, a)]] = True
        found[n] = False
        found[inv[np.nonzero(found[:n])[0]]] = True
        new = found & ~cur
    return frozenset(np.nonzero(cur[:n])[0].tolist())


def generated_partial_subgroup(pg: PartialGroupView, X) -> PartialSubgroup:
    return PartialSubgroup(pg, binary_closure(pg, X))


def word_closure(pg: PartialGroupView, X, max_len: int = 4) -> frozenset:
    """Union of the increasing sets X_0 = X ∪ X^-1 and X_n = products of accepted
    words over X_{n-1}, with words up to max_len.

    Words sharing an automaton state and a running product behave identically
    under extension, so with an automaton the search runs over those pairs.
    """
    cur = frozenset(X) | frozenset(pg.inv[x] for x in X)
    aut = pg.automaton
    while True:
        new = {pg.identity} | set(cur)
        letters = sorted(cur)
        if aut is not None:
            layer = {(aut.start, pg.identity)}
            for _ in range(max_len):
                nxt = set()
                for s, x in layer:
                    for g in letters:
                        t = int(aut.trans[s, g])
                        if aut.accept[t]:
                            nxt.add((t, pg.pair_rows[x][g]))
                new.update(y for _, y in nxt)
                layer = nxt
        else:
            layer = [()]
            for _ in range(max_len):
                nxt = [w + (g,) for w in layer for g in letters if pg.in_domain(w + (g,))]
                new.update(pg.fold(w) for w in nxt)
                layer = nxt
        if new == cur:
            return cur
        cur = frozenset(new)


def is_partial_subgroup(pg: PartialGroupView, H) -> bool:
    H = frozenset(H)
    if pg.identity not in H:
        return False
    rows = pg.pair_rows
    return (all(pg.inv[h] in H for h in H)
            and all(rows[a][b] < 0 or rows[a][b] in H for a in H for b in H))


def is_subgroup(pg: PartialGroupView, H, max_len: int = 4):
    """Partial subgroup whose every word lies in the domain.

    Decided exactly through the automaton when there is one; otherwise up to max_len.
    Returns a bool.
    """
    H = sorted(H)
    if not is_partial_subgroup(pg, H):
        return False
    if pg.automaton is not None:
        return first_rejected(pg.automaton, H) is None
    return all(pg.in_domain(w) for k in range(max_len + 1) for w in itertools.product(H, repeat=k))


def is_normal_in(pg: PartialGroupView, N, conjugators=None) -> bool:
    """Partial subgroup closed under every defined conjugation by ``conjugators``."""
    N = frozenset(N)
    if not is_partial_subgroup(pg, N):
        return False
    gs = range(pg.n) if conjugators is None else conjugators
    for g in gs:
        gi = pg.inv[g]
        for x in N:
            w = (gi, x, g)
            if pg.in_domain(w) and pg.fold(w) not in N:
                return False
    return True


def product_set(pg: PartialGroupView, X, Y) -> frozenset:
    rows = pg.pair_rows
    return frozenset(rows[x][y] for x in X for y in Y if rows[x][y] >= 0)


# -- homomorphisms ------------------------------------------------------------

@dataclass(frozen=True)
class PartialGroupHom:
    dom: PartialGroupView
    cod: PartialGroupView
    map: tuple

    def __call__(self, g):
        return self.map[g]


def verify_homomorphism(h: PartialGroupHom, max_len: int = 4) -> Report:
    """Image words of domain words are in the domain and products map to products.

    With automata on both sides the check covers every word; otherwise words up to max_len.
    """
    dom, cod, m = h.dom, h.cod, list(h.map)
    rep = Report("homomorphism", meta={"dom": dom.n, "cod": cod.n})
    rep.add("hom.identity", m[dom.identity] == cod.identity, (dom.identity,))
    bad = [g for g in range(dom.n) if m[dom.inv[g]] != cod.inv[m[g]]]
    rep.add("hom.inverse", not bad, tuple(bad[:1]) or None)
    w1, w2, bound = _hom_search(h, max_len)
    rep.add("hom.domain", w1 is None, w1, bound=bound)
    rep.add("hom.product", w2 is None, w2, bound=bound)
    return rep


def _hom_search(h, max_len):
    dom, cod, m = h.dom, h.cod, h.map
    if dom.automaton is not None and cod.automaton is not None:
        a, b = dom.automaton, cod.automaton
        start = (a.start, b.start, dom.identity, cod.identity)
        parent = {start: None}
        queue = [start]
        w1 = w2 = None
        for node in queue:
            s, t, x, y = node
            if a.accept[s]:
                if not b.accept[t] and w1 is None:
                    w1 = _trace(parent, node)
                elif b.accept[t] and m[x] != y and w2 is None:
                    w2 = _trace(parent, node)
            else:
                continue
            for g in range(dom.n):
                x2 = dom.pair_rows[x][g]
                t2 = int(b.trans[t, m[g]])
                y2 = cod.pair_rows[y][m[g]] if b.accept[t2] else -1
                nxt = (int(a.trans[s, g]), t2, x2, y2)
                if nxt not in parent:
                    parent[nxt] = (node, g)
                    queue.append(nxt)
        return w1, w2, "exact"
    w1 = w2 = None
    for k in range(max_len + 1):
        for w in itertools.product(range(dom.n), repeat=k):
            if not dom.in_domain(w):
                continue
            v = tuple(m[g] for g in w)
            if not cod.in_domain(v):
                w1 = w1 or w
            elif m[dom.fold(w)] != cod.fold(v):
                w2 = w2 or w
    return w1, w2, max_len


def _trace(parent, node):
    out = []
    while parent[node] is not None:
        node, g = parent[node]
        out.append(g)
    return tuple(reversed(out))


def kernel(h: PartialGroupHom) -> PartialSubgroup:
    K = frozenset(g for g in range(h.dom.n) if h.map[g] == h.cod.identity)
    if not is_normal_in(h.dom, K):
        raise PartialGroupError("kernel is not a partial normal subgroup")
    return PartialSubgroup(h.dom, K)


# -- concrete partial groups ---------------------------------------------------

def full_group_view(G: FiniteGroup, name: str = "") -> PartialGroupView:
    return PartialGroupView(G.n, G.identity, G.inv, G.table, automaton=trivial_automaton(G.n),
                            labels=G.labels, name=name, oracle_name="full")


def free_one_generator() -> PartialGroupView:
    """Elements 1, a, b with b = a^-1; a word is defined when, after deleting the
    identity entries, it alternates between a and b."""
    one, a, b = 0, 1, 2
    pair = [[0, 1, 2], [1, -1, 0], [2, 0, -1]]
    # states: 0 nothing yet, 1 last was a, 2 last was b, 3 dead
    trans = np.array([[0, 1, 2], [1, 3, 2], [2, 1, 3], [3, 3, 3]], dtype=np.int64)
    aut = Automaton(trans, np.array([True, True, True, False]), 0)

    def count_rule(w):
        ca, cb = w.count(a), w.count(b)
        return one if ca == cb else (a if ca > cb else b)

    return PartialGroupView(3, one, [0, 2, 1], pair, automaton=aut, labels=["1", "a", "b"],
                            name="free1", oracle_name="free1", nary=count_rule)


def direct_product(pg1: PartialGroupView, pg2: PartialGroupView) -> PartialGroupView:
    """Element (i, j) has index i*|pg2| + j; a word is defined when both coordinate words are."""
    n1, n2 = pg1.n, pg2.n
    a = np.arange(n1 * n2)
    i, j = a // n2, a % n2
    p1 = pg1.pair[i[:, None], i[None, :]]
    p2 = pg2.pair[j[:, None], j[None, :]]
    pair = np.where((p1 >= 0) & (p2 >= 0), p1 * n2 + p2, -1)
    inv = [pg1.inv[x] * n2 + pg2.inv[y] for x, y in zip(i, j)]
    labels = [f"({pg1.label(x)},{pg2.label(y)})" for x, y in zip(i, j)]
    if pg1.automaton is not None and pg2.automaton is not None:
        kw = {"automaton": product_automaton(pg1.automaton, pg2.automaton)}
    else:
        kw = {"oracle": lambda w: pg1.in_domain(tuple(g // n2 for g in w))
              and pg2.in_domain(tuple(g % n2 for g in w))}
    return PartialGroupView(n1 * n2, pg1.identity * n2 + pg2.identity, inv, pair, labels=labels,
                            name=f"{pg1.name}x{pg2.name}", **kw)


def table_view(n: int, identity: int, inv, pair, words, maxlen: int, labels=None,
               name: str = "") -> PartialGroupView:
    """Domain given by an explicit list of words of length <= maxlen; longer words are rejected.

    The empty word and all length-1 words are accepted implicitly.
    """
    words = {tuple(w) for w in words}
    if any(len(w) > maxlen for w in words):
        raise PartialGroupError("listed word longer than maxlen")
    words |= {()} | {(g,) for g in range(n)}
    prefixes = {w[:i] for w in words for i in range(len(w) + 1)}

    def step(lab, g):
        if lab is None:
            return None
        nxt = lab + (g,)
        return nxt if nxt in prefixes else None

    aut, _ = explore((), n, step, lambda lab: lab in words)
    return PartialGroupView(n, identity, inv, pair, automaton=aut, labels=labels, name=name,
                            oracle_name="table", table_words=sorted(words, key=lambda w: (len(w), w)),
                            table_maxlen=maxlen)


def dedekind_violation(pg: PartialGroupView, subgroups):
    """Search triples (H, K, A) of partial subgroups with HK a partial subgroup for
    one breaking A ∩ HK = (A ∩ H)K when K ⊆ A, or A ∩ HK = H(A ∩ K) when H ⊆ A.
    Returns the offending triple or None."""
    subs = [frozenset(s) for s in subgroups]
    for H in subs:
        for K in subs:
            HK = product_set(pg, H, K)
            if not is_partial_subgroup(pg, HK):
                continue
            for A in subs:
                if K <= A and A & HK != product_set(pg, A & H, K):
                    return (sorted(H), sorted(K), sorted(A))
                if H <= A and A & HK != product_set(pg, H, A & K):
                    return (sorted(H), sorted(K), sorted(A))
    return None
