"""Named example instances."""
from __future__ import annotations

from functools import lru_cache

from .group_core import Subgroup, named_example
from .locality import Locality, delta_closure, locality_from_group, nonidentity_subgroups
from .partial_group import PartialGroupView, free_one_generator

# name -> (group, object choice)
_LOCALITIES = {
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

ZOO = tuple(_LOCALITIES) + ("free1",)


def _seed(G, S, meta, choice):
    if choice == "sylow":
        return [S.members]
    if choice == "all":
        return nonidentity_subgroups(G, S)
    if choice == "parabolic":
        return [S.members, meta["P1"].members, meta["P2"].members]
    raise KeyError(choice)


@lru_cache(maxsize=None)
def _build(name: str):
    if name == "free1":
        return free_one_generator(), {}
    if name not in _LOCALITIES:
        raise KeyError(f"unknown example {name!r}; known: {', '.join(ZOO)}")
    group, choice = _LOCALITIES[name]
    G, S, meta = named_example(group)
    p = meta["p"]
    delta = delta_closure(G, S, _seed(G, S, meta, choice), p)
    loc = locality_from_group(G, S, delta, p, name=name)
    pos = {g: i for i, g in enumerate(loc.embed)}
    extras = {}
    for key, val in meta.items():
        if isinstance(val, Subgroup):
            extras[key] = frozenset(pos[g] for g in val.members if g in pos)
    return loc, extras


def load_example(name: str) -> Locality | PartialGroupView:
    """The instance called ``name``; repeated calls share one object."""
    return _build(name)[0]


def example_subsets(name: str) -> dict:
    """Named subsets of an example (V, M1, M2, P1, P2, C3), as element index sets."""
    return dict(_build(name)[1])
