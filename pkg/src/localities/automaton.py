"""Deterministic finite automata over an element alphabet.

Every built-in word-domain oracle is one of these, which lets equality of two
domains (and the domain conditions for homomorphisms) be decided exactly by
searching the reachable part of a product automaton.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class Automaton:
    trans: np.ndarray   # (states, letters) -> state
    accept: np.ndarray  # (states,) bool
    start: int = 0

    @property
    def n_states(self) -> int:
        return self.trans.shape[0]

    @property
    def n_letters(self) -> int:
        return self.trans.shape[1]

    def run(self, word, state: int | None = None) -> int:
        s = self.start if state is None else state
        t = self.trans
        for g in word:
            s = t[s, g]
        return int(s)

    def accepts(self, word) -> bool:
        return bool(self.accept[self.run(word)])

    def relabel(self, letters) -> "Automaton":
        """Automaton reading letter i as ``letters[i]`` of this one."""
        return Automaton(self.trans[:, np.asarray(letters, dtype=np.int64)], self.accept, self.start)

    def with_accept(self, accept) -> "Automaton":
        return Automaton(self.trans, np.asarray(accept, dtype=bool), self.start)


def explore(start, n_letters: int, step, accepting) -> tuple[Automaton, list]:
    """Build an automaton by breadth-first search from a hashable start label.

    ``step(label, letter)`` gives the next label; ``accepting(label)`` decides
    acceptance. Returns the automaton and the list of state labels.
    """
    labels = [start]
    index = {start: 0}
    rows = []
    i = 0
    while i < len(labels):
        lab = labels[i]
        row = []
        for g in range(n_letters):
            nxt = step(lab, g)
            j = index.get(nxt)
            if j is None:
                j = index[nxt] = len(labels)
                labels.append(nxt)
            row.append(j)
        rows.append(row)
        i += 1
    trans = np.array(rows, dtype=np.int64).reshape(len(labels), n_letters)
    accept = np.array([bool(accepting(lab)) for lab in labels], dtype=bool)
    return Automaton(trans, accept, 0), labels


def trivial_automaton(n_letters: int) -> Automaton:
    """Accepts every word."""
    return Automaton(np.zeros((1, n_letters), dtype=np.int64), np.array([True]), 0)


def product_automaton(a: Automaton, b: Automaton) -> Automaton:
    """Componentwise automaton on the product alphabet (letter i*|B|+j)."""
    na, nb = a.n_states, b.n_states
    la, lb = a.n_letters, b.n_letters
    sa = np.arange(na * nb) // nb
    sb = np.arange(na * nb) % nb
    letters = np.arange(la * lb)
    ga, gb = letters // lb, letters % lb
    trans = a.trans[sa[:, None], ga[None, :]] * nb + b.trans[sb[:, None], gb[None, :]]
    accept = a.accept[sa] & b.accept[sb]
    return Automaton(trans, accept, a.start * nb + b.start)


def _trace(parent, node) -> tuple:
    word = []
    while parent[node] is not None:
        node, g = parent[node]
        word.append(g)
    return tuple(reversed(word))


def first_disagreement(a: Automaton, b: Automaton):
    """Shortest word accepted by exactly one of the two, or None."""
    if a.n_letters != b.n_letters:
        raise ValueError("alphabets differ")
    start = (a.start, b.start)
    parent = {start: None}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        s, t = node
        if a.accept[s] != b.accept[t]:
            return _trace(parent, node)
        for g in range(a.n_letters):
            nxt = (int(a.trans[s, g]), int(b.trans[t, g]))
            if nxt not in parent:
                parent[nxt] = (node, g)
                queue.append(nxt)
    return None


def reachable_states(a: Automaton, letters=None) -> set[int]:
    """States reachable from the start using only ``letters`` (default all)."""
    letters = range(a.n_letters) if letters is None else list(letters)
    seen = {a.start}
    stack = [a.start]
    while stack:
        s = stack.pop()
        for g in letters:
            t = int(a.trans[s, g])
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return seen


def first_rejected(a: Automaton, letters):
    """Shortest word over ``letters`` that the automaton rejects, or None."""
    letters = sorted(letters)
    parent = {a.start: None}
    queue = deque([a.start])
    while queue:
        s = queue.popleft()
        if not a.accept[s]:
            return _trace(parent, s)
        for g in letters:
            t = int(a.trans[s, g])
            if t not in parent:
                parent[t] = (s, g)
                queue.append(t)
    return None
