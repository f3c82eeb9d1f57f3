"""Exhaustive ground truth for small instances.

Everything here enumerates all feasible matchings and compares them by
direct vote evaluation.  Nothing here calls the solvers or the layered
reduction.

The enumeration is materialised once per instance as a
:class:`FeasibleTable`: one row per feasible matching, one column per
resident holding the index of its option (its preference list position,
or ``len(prefs)`` for unmatched).  Votes between options are tabulated per
resident and per hospital, so the margin of every row against a fixed
matching is a handful of array lookups.
"""

from __future__ import annotations

import math
import os
from collections.abc import Iterator
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import GuardExceededError, NotMaxCardinalityError
from .model import Instance, Matching, check_feasible
from .popularity import find_correspondence, hospital_vote, vote

GUARD_ENV = "LCSM_ORACLE_GUARD"


@dataclass(frozen=True)
class Guard:
    """Limits on enumeration size: resident count and the raw search space."""

    max_residents: int = 8
    max_product: int = 10**7

    def check(self, instance: Instance) -> None:
        n = len(instance.residents)
        if n > self.max_residents:
            raise GuardExceededError(
                f"{n} residents exceeds the oracle limit of {self.max_residents}")
        space = math.prod(len(p) + 1 for p in instance.resident_prefs.values())
        if space > self.max_product:
            raise GuardExceededError(
                f"search space {space} exceeds the oracle limit of {self.max_product}")


DEFAULT_GUARD = Guard()
POPULAR_SIZE_GUARD = Guard(max_residents=6)


def guard_from_env(default: Guard) -> Guard:
    """``default`` overridden by ``LCSM_ORACLE_GUARD=residents[,product]`` if set."""
    raw = os.environ.get(GUARD_ENV)
    if not raw:
        return default
    parts = raw.split(",")
    try:
        residents = int(parts[0])
        product = int(parts[1]) if len(parts) > 1 else default.max_product
    except ValueError:
        raise ValueError(f"{GUARD_ENV} must look like 'residents[,product]', got {raw!r}") from None
    return Guard(residents, product)


def _branch(instance: Instance, fixed: tuple[int, ...]) -> list[tuple[int, ...]]:
    """All feasible option rows that start with ``fixed``, in enumeration order."""
    residents = instance.residents
    trees = instance.class_trees
    counts = {h: [0] * len(trees[h].classes) for h in instance.hospitals}
    quotas = {h: [c.quota for c in trees[h].classes] for h in instance.hospitals}
    options = [instance.resident_prefs[r] for r in residents]
    chains = [{h: trees[h].chain(r) for h in options[i]} for i, r in enumerate(residents)]
    row = [0] * len(residents)
    out: list[tuple[int, ...]] = []

    def place(i: int, k: int) -> bool:
        """Try option ``k`` for resident ``i``; True if it stays feasible."""
        if k == len(options[i]):
            return True
        h = options[i][k]
        cnt, q = counts[h], quotas[h]
        chain = chains[i][h]
        if any(cnt[c] >= q[c] for c in chain):
            return False
        for c in chain:
            cnt[c] += 1
        return True

    def unplace(i: int, k: int) -> None:
        if k < len(options[i]):
            h = options[i][k]
            for c in chains[i][h]:
                counts[h][c] -= 1

    def rec(i: int) -> None:
        if i == len(residents):
            out.append(tuple(row))
            return
        choices = [fixed[i]] if i < len(fixed) else range(len(options[i]) + 1)
        for k in choices:
            if place(i, k):
                row[i] = k
                rec(i + 1)
                unplace(i, k)

    rec(0)
    return out


class FeasibleTable:
    """Every feasible matching of a small instance, with vote lookup tables."""

    def __init__(self, instance: Instance, guard: Guard | None = None, threads: int = 1):
        (guard or DEFAULT_GUARD).check(instance)
        self.instance = instance
        residents, hospitals = instance.residents, instance.hospitals
        n = len(residents)

        if n == 0:
            rows = [()]
        elif threads > 1:
            first = range(len(instance.resident_prefs[residents[0]]) + 1)
            with ThreadPoolExecutor(max_workers=threads) as pool:
                parts = list(pool.map(lambda k: _branch(instance, (k,)), first))
            rows = [r for part in parts for r in part]
        else:
            rows = _branch(instance, ())
        self.options = np.array(rows, dtype=np.int16).reshape(len(rows), n)
        self.sizes = np.zeros(len(rows), dtype=np.int16)
        for i, r in enumerate(residents):
            self.sizes += self.options[:, i] < len(instance.resident_prefs[r])

        # distinct resident sets per hospital, and each row's set id
        self.hospital_sets: list[list[frozenset[str]]] = []
        set_ids = np.zeros((len(rows), len(hospitals)), dtype=np.int32)
        lookup: list[dict[frozenset[str], int]] = []
        for j, h in enumerate(hospitals):
            ids: dict[frozenset[str], int] = {}
            for t, row in enumerate(rows):
                s = frozenset(r for r, k in zip(residents, row)
                              if k < len(instance.resident_prefs[r])
                              and instance.resident_prefs[r][k] == h)
                set_ids[t, j] = ids.setdefault(s, len(ids))
            lookup.append(ids)
            self.hospital_sets.append(list(ids))
        self.set_ids = set_ids
        self._set_lookup = lookup

        # resident_votes[i][a, b]: vote of resident i for option a over option b
        self.resident_votes = []
        for r in residents:
            opts = [*instance.resident_prefs[r], None]
            self.resident_votes.append(np.array(
                [[vote(instance, r, x, y) for y in opts] for x in opts], dtype=np.int16))
        # hospital_votes[j][a, b]: net votes of hospital j for set a over set b
        self.hospital_votes = []
        for h, sets in zip(hospitals, self.hospital_sets):
            ms = [Matching({r: h for r in s}) for s in sets]
            table = np.zeros((len(sets), len(sets)), dtype=np.int16)
            for a, rival in enumerate(ms):
                for b, base in enumerate(ms):
                    if a != b:
                        corr = find_correspondence(instance, h, base, rival)
                        table[a, b] = hospital_vote(instance, h, base, rival, corr)
            self.hospital_votes.append(table)

    def __len__(self) -> int:
        return len(self.options)

    def matching(self, row: int) -> Matching:
        inst = self.instance
        pairs = {}
        for r, k in zip(inst.residents, self.options[row]):
            prefs = inst.resident_prefs[r]
            if k < len(prefs):
                pairs[r] = prefs[k]
        return Matching(pairs)

    def __iter__(self) -> Iterator[Matching]:
        return (self.matching(t) for t in range(len(self)))

    def locate(self, m: Matching) -> tuple[np.ndarray, np.ndarray]:
        """Option row and hospital set ids of a feasible matching ``m``."""
        inst = self.instance
        check_feasible(inst, m)
        opts = np.array([
            inst.rank(r, m.hospital_of(r)) if m.hospital_of(r) is not None
            else len(inst.resident_prefs[r])
            for r in inst.residents], dtype=np.int64)
        sets = np.array([self._set_lookup[j][frozenset(m.residents_of(h))]
                         for j, h in enumerate(inst.hospitals)], dtype=np.int64)
        return opts, sets

    def margins_against(self, m: Matching) -> np.ndarray:
        """``Δ(row, m)`` for every row: votes each feasible matching gets over ``m``."""
        opts, sets = self.locate(m)
        total = np.zeros(len(self), dtype=np.int32)
        for i, table in enumerate(self.resident_votes):
            total += table[self.options[:, i], opts[i]]
        for j, table in enumerate(self.hospital_votes):
            total += table[self.set_ids[:, j], sets[j]]
        return total


def enumerate_feasible(instance: Instance, guard: Guard | None = None,
                       threads: int = 1) -> Iterator[Matching]:
    """Every feasible matching once: residents in index order, options in
    preference order with unmatched last."""
    (guard or DEFAULT_GUARD).check(instance)
    if not instance.residents:
        yield Matching()
        return
    if threads > 1:
        yield from FeasibleTable(instance, guard, threads)
        return
    for row in _branch(instance, ()):
        yield Matching({r: instance.resident_prefs[r][k]
                        for r, k in zip(instance.residents, row)
                        if k < len(instance.resident_prefs[r])})


def _verdict(table: FeasibleTable, margins: np.ndarray, rows=None):
    beats = margins > 0
    if rows is not None:
        beats &= rows
    if not beats.any():
        return True, None
    return False, table.matching(int(np.argmax(beats)))


def brute_is_popular(instance: Instance, m: Matching, guard: Guard | None = None,
                     *, table: FeasibleTable | None = None,
                     threads: int = 1) -> tuple[bool, Matching | None]:
    """``(True, None)`` if no feasible matching beats ``m``, else ``(False, witness)``.

    The witness is the first beating matching in enumeration order.
    """
    table = table or FeasibleTable(instance, guard, threads)
    return _verdict(table, table.margins_against(m))


def brute_max_cardinality(instance: Instance, guard: Guard | None = None,
                          *, table: FeasibleTable | None = None, threads: int = 1) -> int:
    table = table or FeasibleTable(instance, guard, threads)
    return int(table.sizes.max())


def brute_max_popular_size(instance: Instance, guard: Guard | None = None,
                           *, table: FeasibleTable | None = None, threads: int = 1) -> int:
    """Largest size of a popular matching (one always exists: any stable one)."""
    table = table or FeasibleTable(instance, guard or POPULAR_SIZE_GUARD, threads)
    order = np.argsort(-table.sizes, kind="stable")
    for t in order:
        if _verdict(table, table.margins_against(table.matching(int(t))))[0]:
            return int(table.sizes[t])
    raise AssertionError("no popular matching found; the vote tables are inconsistent")


def brute_unbeaten_among_maxcard(instance: Instance, m: Matching, guard: Guard | None = None,
                                 *, table: FeasibleTable | None = None,
                                 threads: int = 1) -> tuple[bool, Matching | None]:
    """Whether no maximum-cardinality feasible matching beats ``m``."""
    table = table or FeasibleTable(instance, guard, threads)
    best = int(table.sizes.max())
    if len(m) < best:
        raise NotMaxCardinalityError(f"matching has size {len(m)}, maximum is {best}")
    return _verdict(table, table.margins_against(m), table.sizes == best)
