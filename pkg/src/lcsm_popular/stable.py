"""Resident-proposing deferred acceptance under laminar class quotas."""

from __future__ import annotations

from collections import deque

from .model import Instance, Matching, deepest_saturated


def deferred_acceptance(instance: Instance) -> tuple[Matching, int]:
    """Run deferred acceptance and return ``(matching, number_of_proposals)``.

    Free residents wait in a FIFO queue (initially in instance order) and
    propose down their lists.  A hospital accepts a proposal outright when
    the enlarged set stays feasible.  Otherwise it looks at the deepest
    saturated class ``D`` containing the proposer and keeps whichever of the
    proposer and the worst member of ``D`` it prefers.  Evicting from ``D``
    relieves ``D`` and every saturated ancestor at once.

    Each resident proposes to each acceptable hospital at most once, so the
    number of proposals is bounded by the number of edges.
    """
    classes = {h: instance.class_trees[h].classes for h in instance.hospitals}
    counts = {h: [0] * len(classes[h]) for h in instance.hospitals}
    held: dict[str, set[str]] = {h: set() for h in instance.hospitals}
    next_choice = {r: 0 for r in instance.residents}
    assignment: dict[str, str] = {}
    free = deque(instance.residents)
    proposals = 0

    def add(h: str, r: str, sign: int) -> None:
        for i in instance.class_trees[h].chain(r):
            counts[h][i] += sign

    while free:
        r = free.popleft()
        prefs = instance.resident_prefs[r]
        if next_choice[r] >= len(prefs):
            continue
        h = prefs[next_choice[r]]
        next_choice[r] += 1
        proposals += 1

        d = deepest_saturated(instance, h, counts[h], r)
        if d is None:
            held[h].add(r)
            add(h, r, +1)
            assignment[r] = h
            continue
        members = classes[h][d].members
        inside = [x for x in held[h] if x in members]
        if inside:
            worst = max(inside, key=lambda x: instance.rank(h, x))
            if instance.prefers(h, r, worst):
                held[h].remove(worst)
                add(h, worst, -1)
                del assignment[worst]
                free.append(worst)
                held[h].add(r)
                add(h, r, +1)
                assignment[r] = h
                continue
        free.append(r)

    return Matching(assignment), proposals


def solve_stable(instance: Instance) -> Matching:
    """A stable matching of ``instance`` (deterministic for a fixed input)."""
    return deferred_acceptance(instance)[0]
