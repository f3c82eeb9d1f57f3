"""Seeded random instances with laminar class trees.

Randomness comes from :class:`random.Random` (Mersenne Twister MT19937)
seeded with the config's integer seed, so a given config yields the same
instance on every run and platform.  Fixtures meant to be shared with other
implementations should be committed as files instead of regenerated.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .model import Instance, RawInstance, validate_instance

KEEP_CLASS_PROB = 0.7


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int = 1
    n_residents: int = 6
    n_hospitals: int = 4
    max_capacity: int = 3
    edge_density: float = 0.5
    max_tree_depth: int = 3
    class_branching: int = 3
    quota_tightness: float = 0.6
    partition: bool = False

    def __post_init__(self) -> None:
        for name in ("n_residents", "n_hospitals", "max_capacity"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.max_tree_depth < 0:
            raise ValueError("max_tree_depth must be non-negative")
        if self.class_branching < 2:
            raise ValueError("class_branching must be at least 2")
        for name in ("edge_density", "quota_tightness"):
            if not 0 < getattr(self, name) <= 1:
                raise ValueError(f"{name} must lie in (0, 1]")


def _split(rng: random.Random, members: list[str], parts: int) -> list[list[str]]:
    members = members[:]
    rng.shuffle(members)
    cuts = sorted(rng.sample(range(1, len(members)), parts - 1))
    bounds = [0, *cuts, len(members)]
    return [members[a:b] for a, b in zip(bounds, bounds[1:])]


def _classes(rng: random.Random, preflist: list[str], cfg: GeneratorConfig):
    """Class specs ``(cid, members, quota)`` for one hospital, root excluded."""
    out: list[tuple[str, list[str], int]] = []

    def quota(size: int) -> int:
        return rng.randint(1, max(1, math.ceil(cfg.quota_tightness * size)))

    def grow(members: list[str], depth: int) -> None:
        if depth >= cfg.max_tree_depth or len(members) < 2:
            return
        parts = rng.randint(2, min(cfg.class_branching, len(members)))
        for group in _split(rng, members, parts):
            if not cfg.partition and rng.random() >= KEEP_CLASS_PROB:
                continue
            out.append((f"c{len(out) + 1}", group, quota(len(group))))
            if not cfg.partition:
                grow(group, depth + 1)

    grow(list(preflist), 0)
    return out


def generate(cfg: GeneratorConfig) -> Instance:
    """A random valid instance.

    Each resident/hospital pair is an edge with probability ``edge_density``
    and both sides rank their neighbours uniformly at random.  Class trees
    come from recursively splitting a hospital's list into 2 to
    ``class_branching`` groups, keeping each group with probability 0.7, to
    depth ``max_tree_depth``.  With ``partition=True`` the list is split once
    and every group is kept, so the classes partition it.
    """
    rng = random.Random(cfg.seed)
    residents = [f"r{i + 1}" for i in range(cfg.n_residents)]
    hospitals = [f"h{j + 1}" for j in range(cfg.n_hospitals)]
    capacity = {h: rng.randint(1, cfg.max_capacity) for h in hospitals}

    acceptable: dict[str, list[str]] = {r: [] for r in residents}
    for r in residents:
        for h in hospitals:
            if rng.random() < cfg.edge_density:
                acceptable[r].append(h)
    listing: dict[str, list[str]] = {h: [] for h in hospitals}
    for r in residents:
        for h in acceptable[r]:
            listing[h].append(r)

    r_prefs = {}
    for r in residents:
        prefs = acceptable[r][:]
        rng.shuffle(prefs)
        r_prefs[r] = prefs
    h_prefs = {}
    classes = {}
    for h in hospitals:
        prefs = listing[h][:]
        rng.shuffle(prefs)
        h_prefs[h] = prefs
        classes[h] = _classes(rng, prefs, cfg)

    return validate_instance(RawInstance(residents, hospitals, capacity, r_prefs, h_prefs, classes))
