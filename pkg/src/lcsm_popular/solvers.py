"""End-to-end popular matching algorithms built on the layered reduction.

Both run deferred acceptance on the ``s``-level instance and project the result back:

* ``s = 2`` gives a maximum cardinality popular matching, in O(mn) time
  for laminar classes.
* ``s = |R|`` gives a maximum cardinality matching that no other maximum
  cardinality matching beats, in O(mn^2) time.
"""

from __future__ import annotations

from .model import Instance, Matching
from .reduction import build_layered, map_down
from .stable import solve_stable


def via_layers(instance: Instance, s: int) -> Matching:
    layered = build_layered(instance, s)
    return map_down(layered, solve_stable(layered.instance))


def max_cardinality_popular(instance: Instance) -> Matching:
    return via_layers(instance, 2)


def popular_among_max_cardinality(instance: Instance) -> Matching:
    if len(instance.residents) < 2:
        return solve_stable(instance)
    return via_layers(instance, len(instance.residents))
