"""Shared fixtures-by-import and independent reference checks."""

from __future__ import annotations

import itertools
import random
from pathlib import Path

from hypothesis import strategies as st

from lcsm_popular.formats import parse_instance, parse_matching
from lcsm_popular.generator import GeneratorConfig, generate
from lcsm_popular.model import Instance, Matching, is_feasible_set

DATA = Path(__file__).parent / "data"

# criterion lines collected by the acceptance tests, printed at session end
REPORT: list[str] = []


def example() -> Instance:
    return parse_instance((DATA / "two_class.lcsm").read_text())


def example_matching(name: str) -> Matching:
    return parse_matching((DATA / f"{name}.matching").read_text(), example())


def small_config(rng: random.Random, seed: int, max_residents: int = 6,
                 partition: bool | None = None) -> GeneratorConfig:
    return GeneratorConfig(
        seed=seed,
        n_residents=rng.randint(1, max_residents),
        n_hospitals=rng.randint(1, 4),
        max_capacity=3,
        edge_density=rng.uniform(0.3, 1.0),
        max_tree_depth=3,
        class_branching=rng.randint(2, 3),
        quota_tightness=rng.uniform(0.2, 1.0),
        partition=rng.random() < 0.2 if partition is None else partition,
    )


def random_small(seed: int, max_residents: int = 6, partition: bool | None = None) -> Instance:
    return generate(small_config(random.Random(seed), seed, max_residents, partition))


@st.composite
def small_instances(draw, max_residents: int = 5, partition: bool = False) -> Instance:
    cfg = GeneratorConfig(
        seed=draw(st.integers(0, 2**63 - 1)),
        n_residents=draw(st.integers(1, max_residents)),
        n_hospitals=draw(st.integers(1, 4)),
        max_capacity=draw(st.integers(1, 3)),
        edge_density=draw(st.floats(0.2, 1.0)),
        max_tree_depth=draw(st.integers(0, 3)),
        class_branching=draw(st.integers(2, 3)),
        quota_tightness=draw(st.floats(0.1, 1.0)),
        partition=partition or draw(st.booleans()),
    )
    return generate(cfg)


# reference checks written straight from the definitions, sharing no code
# with the library beyond the per-hospital quota test


def all_matchings(inst: Instance):
    """Every feasible matching by plain product enumeration."""
    choices = [[None, *inst.resident_prefs[r]] for r in inst.residents]
    for combo in itertools.product(*choices):
        m = Matching({r: h for r, h in zip(inst.residents, combo) if h is not None})
        if all(is_feasible_set(inst, h, m.residents_of(h)) for h in inst.hospitals):
            yield m


def reference_blocking(inst: Instance, m: Matching) -> set[tuple[str, str]]:
    out = set()
    for r in inst.residents:
        cur = m.hospital_of(r)
        for h in inst.resident_prefs[r]:
            if cur is not None and inst.rank(r, h) >= inst.rank(r, cur):
                continue
            held = set(m.residents_of(h))
            if is_feasible_set(inst, h, held | {r}):
                out.add((r, h))
                continue
            for x in held:
                if inst.rank(h, r) < inst.rank(h, x) and is_feasible_set(inst, h, (held - {x}) | {r}):
                    out.add((r, h))
                    break
    return out


def reference_delta(inst: Instance, m: Matching, rival: Matching) -> int:
    """Votes ``rival`` gets over ``m``, evaluated vertex by vertex from scratch."""

    def pref(u, x, y):
        if x == y:
            return 0
        if x is None or y is None:
            return 1 if y is None else -1
        return 1 if inst.rank(u, x) < inst.rank(u, y) else -1

    total = sum(pref(r, rival.hospital_of(r), m.hospital_of(r)) for r in inst.residents)
    for h in inst.hospitals:
        old, new = set(m.residents_of(h)), set(rival.residents_of(h))
        total += len(new) - len(old)
        lost, gained = old - new, new - old
        while lost and gained:
            shared = [c for c in inst.class_trees[h] if c.members & lost and c.members & gained]
            c = max(shared, key=lambda c: c.depth)
            xs = sorted(c.members & lost, key=lambda r: inst.rank(h, r))
            ys = sorted(c.members & gained, key=lambda r: inst.rank(h, r))
            for x, y in zip(xs, ys):
                total += pref(h, y, x)
                lost.discard(x)
                gained.discard(y)
    return total
