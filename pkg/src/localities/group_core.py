"""Cayley-table finite groups built from permutations, with subgroup machinery."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from math import gcd

import numpy as np

MAX_ORDER = 10_000
LATTICE_CAP = 200

Perm = tuple[int, ...]


class GroupError(ValueError):
    pass


# -- permutations ---------------------------------------------------------

_CYCLE = re.compile(r"\(([^()]*)\)")


def parse_perm(text: str, degree: int | None = None) -> Perm:
    """Parse 1-based cycle notation such as ``(1 2 3)(4 5)``; ``()`` is the identity."""
    text = text.strip()
    if _CYCLE.sub("", text).strip():
        raise GroupError(f"bad cycle notation: {text!r}")
    cycles = []
    for body in _CYCLE.findall(text):
        pts = [int(t) - 1 for t in body.replace(",", " ").split()]
        if any(p < 0 for p in pts) or len(set(pts)) != len(pts):
            raise GroupError(f"bad cycle: ({body})")
        cycles.append(pts)
    top = max((p + 1 for c in cycles for p in c), default=0)
    deg = max(top, degree or 0)
    img = list(range(deg))
    for c in cycles:
        for a, b in zip(c, c[1:] + c[:1]):
            img[a] = b
    return tuple(img)


def parse_perm_list(text: str) -> list[Perm]:
    """Comma- or semicolon-separated generator list on one line."""
    parts = [p for p in re.split(r"[;,]\s*(?=\()", text.strip()) if p.strip()]
    return [parse_perm(p) for p in parts]


def format_perm(perm: Perm) -> str:
    seen = set()
    out = []
    for start in range(len(perm)):
        if start in seen or perm[start] == start:
            continue
        cyc = [start]
        seen.add(start)
        x = perm[start]
        while x != start:
            cyc.append(x)
            seen.add(x)
            x = perm[x]
        out.append("(" + " ".join(str(c + 1) for c in cyc) + ")")
    return "".join(out) or "()"


def _pad(perm: Perm, deg: int) -> Perm:
    return perm + tuple(range(len(perm), deg))


# -- groups ---------------------------------------------------------------

class FiniteGroup:
    """A finite group given by its Cayley table; element 0 need not be the identity."""

    def __init__(self, table, identity: int = 0, inv=None, labels=None, perms=None,
                 check: bool = True):
        table = np.asarray(table, dtype=np.int64)
        n = table.shape[0]
        if n == 0 or table.shape != (n, n):
            raise GroupError("Cayley table must be a nonempty square array")
        self.n = n
        self.table = table
        self.rows = table.tolist()
        self.identity = identity
        if inv is None:
            inv = [0] * n
            for g in range(n):
                inv[g] = self.rows[g].index(identity)
        self.inv = list(inv)
        self.labels = list(labels) if labels is not None else None
        self.perms = perms
        if check:
            self._check()

    def _check(self):
        n, e, t = self.n, self.identity, self.table
        ar = np.arange(n)
        if not (np.array_equal(t[e], ar) and np.array_equal(t[:, e], ar)):
            raise GroupError("identity row/column wrong")
        if any(self.inv[self.inv[g]] != g or self.rows[g][self.inv[g]] != e for g in range(n)):
            raise GroupError("inverse table wrong")
        if n <= LATTICE_CAP:
            lhs = t[t[:, :, None], np.arange(n)[None, None, :]]   # (ab)c
            rhs = t[np.arange(n)[:, None, None], t[None, :, :]]   # a(bc)
            if not np.array_equal(lhs, rhs):
                raise GroupError("table is not associative")

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"FiniteGroup(n={self.n})"

    def mul(self, a: int, b: int) -> int:
        return self.rows[a][b]

    def conj(self, x: int, g: int) -> int:
        """x^g = g^-1 x g."""
        r = self.rows
        return r[r[self.inv[g]][x]][g]

    def power(self, g: int, k: int) -> int:
        x = self.identity
        for _ in range(k):
            x = self.rows[x][g]
        return x

    def order_of(self, g: int) -> int:
        k, x = 1, g
        while x != self.identity:
            x = self.rows[x][g]
            k += 1
        return k

    def label(self, g: int) -> str:
        return self.labels[g] if self.labels else str(g)

    def elements(self) -> range:
        return range(self.n)

    def whole(self) -> "Subgroup":
        return Subgroup(self, frozenset(range(self.n)))

    def trivial(self) -> "Subgroup":
        return Subgroup(self, frozenset([self.identity]))


@dataclass(frozen=True)
class Subgroup:
    parent: FiniteGroup = field(compare=False, hash=False, repr=False)
    members: frozenset

    def __len__(self):
        return len(self.members)

    def __contains__(self, g):
        return g in self.members

    def __iter__(self):
        return iter(sorted(self.members))

    @property
    def order(self) -> int:
        return len(self.members)

    def sorted(self) -> list[int]:
        return sorted(self.members)

    def __le__(self, other: "Subgroup") -> bool:
        return self.members <= other.members

    def __repr__(self):
        return f"Subgroup(order={len(self.members)})"


@dataclass(frozen=True)
class GroupHom:
    dom: FiniteGroup
    cod: FiniteGroup
    map: tuple

    def __call__(self, g: int) -> int:
        return self.map[g]

    def is_hom(self) -> bool:
        m = np.asarray(self.map)
        return bool(np.array_equal(m[self.dom.table], self.cod.table[m[:, None], m[None, :]]))

    def kernel(self) -> Subgroup:
        return Subgroup(self.dom, frozenset(g for g in range(self.dom.n) if self.map[g] == self.cod.identity))

    def image(self) -> Subgroup:
        return Subgroup(self.cod, frozenset(self.map))


def generate_group(generators, max_order: int = MAX_ORDER) -> FiniteGroup:
    """Breadth-first closure of permutations under composition.

    Products act on the right: ``(gh)`` applies g first. Element 0 is the identity.
    """
    gens = [tuple(g) for g in generators]
    deg = max((len(g) for g in gens), default=0)
    gens = [_pad(g, deg) for g in gens]
    for g in gens:
        if sorted(g) != list(range(deg)):
            raise GroupError(f"not a permutation: {g}")
    ident = tuple(range(deg))
    elems = [ident]
    index = {ident: 0}
    parent = [(-1, -1)]
    i = 0
    while i < len(elems):
        e = elems[i]
        for k, s in enumerate(gens):
            c = tuple(s[x] for x in e)
            if c not in index:
                if len(elems) >= max_order:
                    raise GroupError(f"group order exceeds cap {max_order}")
                index[c] = len(elems)
                elems.append(c)
                parent.append((i, k))
        i += 1
    n = len(elems)
    right = np.array([[index[tuple(s[x] for x in e)] for s in gens] for e in elems],
                     dtype=np.int64).reshape(n, len(gens))
    table = np.empty((n, n), dtype=np.int64)
    table[:, 0] = np.arange(n)
    for j in range(1, n):
        pj, k = parent[j]
        table[:, j] = right[table[:, pj], k]
    labels = [format_perm(e) for e in elems]
    return FiniteGroup(table, 0, labels=labels, perms=elems)


def direct_product_group(G: FiniteGroup, H: FiniteGroup) -> FiniteGroup:
    """Element (g, h) has index g*|H| + h."""
    n, m = G.n, H.n
    a = np.arange(n * m)
    ga, ha = a // m, a % m
    t = G.table[ga[:, None], ga[None, :]] * m + H.table[ha[:, None], ha[None, :]]
    labels = [f"({G.label(g)},{H.label(h)})" for g in range(n) for h in range(m)]
    return FiniteGroup(t, G.identity * m + H.identity, labels=labels)



# -- subgroups ------------------------------------------------------------

def _closure(G: FiniteGroup, gens) -> frozenset:
    gens = [g for g in dict.fromkeys(gens) if g != G.identity]
    elems = [G.identity]
    seen = {G.identity}
    rows = G.rows
    i = 0
    while i < len(elems):
        e = rows[elems[i]]
        for s in gens:
            c = e[s]
            if c not in seen:
                seen.add(c)
                elems.append(c)
        i += 1
    return frozenset(seen)


def subgroup_closure(G: FiniteGroup, seed) -> Subgroup:
    return Subgroup(G, _closure(G, sorted(seed)))


def conjugate_set(G: FiniteGroup, X, g: int) -> frozenset:
    return frozenset(G.conj(x, g) for x in X)


def is_normal(G: FiniteGroup, H) -> bool:
    H = _members(H)
    return all(G.conj(x, g) in H for g in range(G.n) for x in H)


def _members(H):
    return H.members if isinstance(H, Subgroup) else frozenset(H)


def transporter(G: FiniteGroup, P, Q) -> frozenset:
    """{g : P^g ⊆ Q}."""
    P, Q = _members(P), _members(Q)
    return frozenset(g for g in range(G.n) if all(G.conj(x, g) in Q for x in P))


def normalizer(G: FiniteGroup, P) -> Subgroup:
    P = _members(P)
    return Subgroup(G, frozenset(g for g in range(G.n) if all(G.conj(x, g) in P for x in P)))


def centralizer(G: FiniteGroup, X) -> Subgroup:
    X = _members(X)
    r = G.rows
    return Subgroup(G, frozenset(g for g in range(G.n) if all(r[x][g] == r[g][x] for x in X)))


def p_part(n: int, p: int) -> int:
    q = 1
    while n % p == 0:
        n //= p
        q *= p
    return q


def is_p_power(n: int, p: int) -> bool:
    return p_part(n, p) == n


def sylow_subgroup(G: FiniteGroup, p: int) -> Subgroup:
    """Grow a p-subgroup one factor of p at a time inside its normalizer."""
    target = p_part(G.n, p)
    P = frozenset([G.identity])
    while len(P) < target:
        N = normalizer(G, P).members
        for x in sorted(N - P):
            if G.power(x, p) in P:
                P = _closure(G, sorted(P) + [x])
                break
        else:  # pragma: no cover - Sylow's theorem guarantees a candidate
            raise GroupError("no extension found")
    return Subgroup(G, P)


def cyclic_subgroups(G: FiniteGroup, within=None) -> list[frozenset]:
    elems = sorted(_members(within)) if within is not None else range(G.n)
    out = {}
    for g in elems:
        c = _closure(G, [g])
        out.setdefault(c, g)
    return sorted(out, key=_key)


def _key(s) -> tuple:
    return (len(s), sorted(s))


def all_subgroups(G: FiniteGroup, within=None, cap: int = LATTICE_CAP) -> list[frozenset]:
    """Every subgroup of ``within`` (default G), found as joins of cyclic subgroups."""
    H = _members(within) if within is not None else frozenset(range(G.n))
    if len(H) > cap:
        raise GroupError(f"subgroup lattice capped at order {cap}")
    cyc = {}
    for g in sorted(H):
        cyc.setdefault(_closure(G, [g]), g)
    gens_of = {c: (g,) for c, g in cyc.items()}
    frontier = list(gens_of)
    while frontier:
        nxt = []
        for A in frontier:
            for C, g in cyc.items():
                if C <= A:
                    continue
                gens = gens_of[A] + (g,)
                J = _closure(G, gens)
                if J not in gens_of:
                    gens_of[J] = gens
                    nxt.append(J)
        frontier = nxt
    return sorted(gens_of, key=_key)


def overgroups(G: FiniteGroup, H) -> list[frozenset]:
    """All subgroups of G containing H."""
    H = _members(H)
    base = tuple(sorted(H))
    found = {H: base}
    frontier = [H]
    while frontier:
        nxt = []
        for A in frontier:
            for g in range(G.n):
                if g in A:
                    continue
                J = _closure(G, found[A] + (g,))
                if J not in found:
                    found[J] = found[A] + (g,)
                    nxt.append(J)
        frontier = nxt
    return sorted(found, key=_key)


def normal_closure(G: FiniteGroup, X) -> Subgroup:
    gens = sorted({G.conj(x, g) for x in _members(X) for g in range(G.n)})
    return Subgroup(G, _closure(G, gens))


def normal_subgroups(G: FiniteGroup) -> list[frozenset]:
    """Joins of normal closures of single elements."""
    base = {}
    for g in range(G.n):
        base.setdefault(normal_closure(G, [g]).members, g)
    found = set(base)
    frontier = list(found)
    while frontier:
        nxt = []
        for A in frontier:
            for B in base:
                if B <= A:
                    continue
                J = _closure(G, sorted(A | B))
                if J not in found:
                    found.add(J)
                    nxt.append(J)
        frontier = nxt
    return sorted(found, key=_key)


def cores(G: FiniteGroup, p: int) -> tuple[Subgroup, Subgroup]:
    """(O_p(G), O_p'(G))."""
    normals = normal_subgroups(G)
    op = frozenset([G.identity])
    opp = frozenset([G.identity])
    for N in normals:
        if is_p_power(len(N), p):
            op = _closure(G, sorted(op | N))
        elif gcd(len(N), p) == 1:
            opp = _closure(G, sorted(opp | N))
    return Subgroup(G, op), Subgroup(G, opp)


def is_characteristic_p(G: FiniteGroup, p: int) -> bool:
    op, _ = cores(G, p)
    return centralizer(G, op).members <= op.members


def quotient_group(G: FiniteGroup, N) -> tuple[FiniteGroup, GroupHom]:
    N = _members(N)
    if G.identity not in N or not is_normal(G, N) or _closure(G, sorted(N)) != N:
        raise GroupError("not a normal subgroup")
    coset_of = [-1] * G.n
    reps = []
    for g in range(G.n):
        if coset_of[g] < 0:
            for x in N:
                coset_of[G.rows[x][g]] = len(reps)
            reps.append(g)
    # cosets are numbered by smallest member, so the identity coset comes first
    # only when the identity has the smallest index; relabel to make it 0
    e = coset_of[G.identity]
    order = [e] + [i for i in range(len(reps)) if i != e]
    relabel = {old: new for new, old in enumerate(order)}
    coset_of = [relabel[c] for c in coset_of]
    reps = [reps[old] for old in order]
    m = len(reps)
    table = [[coset_of[G.rows[reps[a]][reps[b]]] for b in range(m)] for a in range(m)]
    labels = ["{" + G.label(r) + "}" for r in reps]
    Q = FiniteGroup(table, 0, labels=labels)
    return Q, GroupHom(G, Q, tuple(coset_of))


def subgroup_as_group(G: FiniteGroup, H) -> tuple[FiniteGroup, list[int]]:
    """H as a standalone group; returns it with the embedding of indices into G."""
    emb = sorted(_members(H))
    pos = {g: i for i, g in enumerate(emb)}
    table = [[pos[G.rows[a][b]] for b in emb] for a in emb]
    labels = [G.label(g) for g in emb]
    return FiniteGroup(table, pos[G.identity], labels=labels), emb


class PreconditionError(ValueError):
    pass


def conjugate_family_escapes(S: Subgroup, P, gamma) -> bool:
    """For a set of S-conjugates of P stable under conjugation by its union X:
    either it is just {P}, or N_S(P) ∩ X is not contained in P."""
    G = S.parent
    P = _members(P)
    gamma = {_members(Q) for Q in gamma}
    if not gamma:
        raise PreconditionError("empty family")
    cls = {conjugate_set(G, P, s) for s in S.members}
    if not gamma <= cls:
        raise PreconditionError("member not an S-conjugate of P")
    X = frozenset().union(*gamma)
    if any(conjugate_set(G, P, x) not in gamma for x in X):
        raise PreconditionError("family not stable under its union")
    if gamma == {P}:
        return True
    NSP = normalizer(G, P).members & S.members
    return not (NSP & X) <= P


# -- named examples ---------------------------------------------------------

def _gl32_generators():
    vecs = [v for v in range(1, 8)]  # nonzero vectors of F_2^3 as bitmasks

    def act(mat):
        # mat: images of the basis vectors e1, e2, e3
        def apply(v):
            r = 0
            for i in range(3):
                if v >> i & 1:
                    r ^= mat[i]
            return r
        return tuple(vecs.index(apply(v)) for v in vecs)

    # elementary transvection and a Singer-type cycle
    return [act((0b001, 0b011, 0b100)), act((0b010, 0b100, 0b011))]


def _o4plus2_generators():
    pts = [(a, b) for a in range(3) for b in range(3)]

    def perm(f):
        return tuple(pts.index(f(a, b)) for a, b in pts)

    return [
        perm(lambda a, b: ((a + 1) % 3, b)),        # translation in V
        perm(lambda a, b: (b, a)),                   # swap coordinates
        perm(lambda a, b: ((-a) % 3, b)),            # negate first coordinate
    ]


def _maximal_overgroups(G: FiniteGroup, S) -> list[frozenset]:
    ups = [H for H in overgroups(G, S) if len(H) < G.n]
    return [H for H in ups if not any(H < K for K in ups)]


NAMED = ("S3", "D8", "S4", "C6", "S3xC3", "C3xD8", "O4plus2", "GL3_2")


def named_example(name: str) -> tuple[FiniteGroup, Subgroup, dict]:
    """A small group, a Sylow subgroup for its designated prime, and metadata."""
    meta: dict = {"name": name}
    if name == "S3":
        G, p = generate_group([parse_perm("(1 2 3)"), parse_perm("(1 2)")]), 3
    elif name == "D8":
        G, p = generate_group([parse_perm("(1 2 3 4)"), parse_perm("(1 3)")]), 2
    elif name == "S4":
        G, p = generate_group([parse_perm("(1 2 3 4)"), parse_perm("(1 2)")]), 2
    elif name == "C6":
        G, p = generate_group([parse_perm("(1 2 3)(4 5)")]), 2
    elif name == "S3xC3":
        G, p = generate_group([parse_perm("(1 2 3)"), parse_perm("(1 2)"),
                               parse_perm("(4 5 6)")]), 3
    elif name == "C3xD8":
        G, p = generate_group([parse_perm("(1 2 3)"), parse_perm("(4 5 6 7)"),
                               parse_perm("(4 6)")]), 2
    elif name == "O4plus2":
        G, p = generate_group(_o4plus2_generators()), 2
    elif name == "GL3_2":
        G, p = generate_group(_gl32_generators()), 2
    else:
        raise KeyError(f"unknown example {name!r}")
    S = sylow_subgroup(G, p)
    meta["p"] = p
    if name == "O4plus2":
        meta["V"] = Subgroup(G, cores(G, 3)[0].members)
    if name == "GL3_2":
        M1, M2 = _maximal_overgroups(G, S.members)
        meta["M1"], meta["M2"] = Subgroup(G, M1), Subgroup(G, M2)
        for i, M in ((1, M1), (2, M2)):
            Mg, emb = subgroup_as_group(G, M)
            op = cores(Mg, 2)[0]
            meta[f"P{i}"] = Subgroup(G, frozenset(emb[x] for x in op.members))
    if name == "C3xD8":
        meta["C3"] = Subgroup(G, cores(G, 2)[1].members)
    return G, S, meta
