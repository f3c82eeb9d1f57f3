"""Instances, class trees, matchings, feasibility and stability.

An instance is a bipartite preference system between residents and
hospitals.  Every hospital carries a laminar family of classes over the
residents it finds acceptable; each class has an upper quota, and the root
class (all acceptable residents) has quota equal to the hospital capacity.

Instances are built through :func:`validate_instance`, which reports every
problem at once instead of stopping at the first one.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from types import MappingProxyType

from .errors import (
    InfeasibleMatchingError,
    InstanceValidationError,
    Issue,
    UnknownResidentError,
)

ROOT_ID = "*"

# validation issue codes
NON_LAMINAR = "NON_LAMINAR"
DUPLICATE_CLASS = "DUPLICATE_CLASS"
CLASS_OUTSIDE_PREFLIST = "CLASS_OUTSIDE_PREFLIST"
NON_MUTUAL_EDGE = "NON_MUTUAL_EDGE"
DUPLICATE_PREF_ENTRY = "DUPLICATE_PREF_ENTRY"
BAD_QUOTA = "BAD_QUOTA"
DUPLICATE_ID = "DUPLICATE_ID"
UNKNOWN_ID = "UNKNOWN_ID"
EMPTY_CLASS = "EMPTY_CLASS"


@dataclass(frozen=True)
class HospitalClass:
    cid: str
    members: frozenset[str]
    quota: int
    parent: str | None
    depth: int


class ClassTree:
    """Laminar classes of one hospital, stored in DFS preorder (root first).

    Children of a class are ordered by their most preferred member in the
    hospital's list, so the preorder is canonical for a given family.
    """

    __slots__ = ("classes", "_index", "_chains")

    def __init__(self, classes: Iterable[HospitalClass], preflist: Iterable[str]):
        self.classes: tuple[HospitalClass, ...] = tuple(classes)
        self._index = {c.cid: i for i, c in enumerate(self.classes)}
        chains: dict[str, tuple[int, ...]] = {}
        for r in preflist:
            # preorder visits ancestors before descendants
            chains[r] = tuple(i for i, c in enumerate(self.classes) if r in c.members)
        self._chains = chains

    @property
    def root(self) -> HospitalClass:
        return self.classes[0]

    def __len__(self) -> int:
        return len(self.classes)

    def __iter__(self) -> Iterator[HospitalClass]:
        return iter(self.classes)

    def __getitem__(self, cid: str) -> HospitalClass:
        return self.classes[self._index[cid]]

    def index(self, cid: str) -> int:
        return self._index[cid]

    def chain(self, resident: str) -> tuple[int, ...]:
        """Indices of the classes containing ``resident``, root to leaf."""
        return self._chains[resident]

    @property
    def parent(self) -> dict[str, str | None]:
        return {c.cid: c.parent for c in self.classes}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ClassTree):
            return NotImplemented
        return self.classes == other.classes

    def __hash__(self) -> int:
        return hash(self.classes)

    def __repr__(self) -> str:
        inner = ", ".join(f"{c.cid}<{c.quota}>{sorted(c.members)}" for c in self.classes)
        return f"ClassTree({inner})"


@dataclass(frozen=True)
class Instance:
    """A validated instance with laminar class trees.  Treat every field as read-only.

    Build instances with :func:`validate_instance` (or :func:`make_instance`)
    rather than calling the constructor directly.
    """

    residents: tuple[str, ...]
    hospitals: tuple[str, ...]
    capacity: Mapping[str, int]
    resident_prefs: Mapping[str, tuple[str, ...]]
    hospital_prefs: Mapping[str, tuple[str, ...]]
    class_trees: Mapping[str, ClassTree]

    resident_index: Mapping[str, int] = field(init=False, repr=False, compare=False)
    hospital_index: Mapping[str, int] = field(init=False, repr=False, compare=False)
    _rank: Mapping[str, Mapping[str, int]] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        set_ = object.__setattr__
        set_(self, "resident_index", {r: i for i, r in enumerate(self.residents)})
        set_(self, "hospital_index", {h: i for i, h in enumerate(self.hospitals)})
        rank: dict[str, dict[str, int]] = {}
        for r, prefs in self.resident_prefs.items():
            rank[r] = {h: i for i, h in enumerate(prefs)}
        for h, prefs in self.hospital_prefs.items():
            rank[h] = {r: i for i, r in enumerate(prefs)}
        set_(self, "_rank", rank)

    def __hash__(self) -> int:
        return hash((self.residents, self.hospitals))

    def is_resident(self, u: str) -> bool:
        return u in self.resident_index

    def is_hospital(self, u: str) -> bool:
        return u in self.hospital_index

    def rank(self, u: str, v: str) -> int | None:
        """Position of ``v`` in ``u``'s list (0 is best), ``None`` if unacceptable."""
        return self._rank[u].get(v)

    def prefers(self, u: str, x: str, y: str) -> bool:
        ranks = self._rank[u]
        return ranks[x] < ranks[y]

    def is_edge(self, r: str, h: str) -> bool:
        return r in self._rank and h in self._rank[r]

    def edges(self) -> Iterator[tuple[str, str]]:
        for r in self.residents:
            for h in self.resident_prefs[r]:
                yield r, h

    @property
    def num_edges(self) -> int:
        return sum(len(p) for p in self.resident_prefs.values())

    def is_partition(self) -> bool:
        """True if every hospital's non-root classes partition its list."""
        for h in self.hospitals:
            tree = self.class_trees[h]
            if len(tree) == 1:
                continue
            if any(c.depth > 1 for c in tree):
                return False
            covered = sum(len(c.members) for c in tree.classes[1:])
            if covered != len(self.hospital_prefs[h]):
                return False
        return True


@dataclass
class RawInstance:
    """Unvalidated instance data, as produced by the parser or by hand.

    ``classes`` maps a hospital to ``(class_id, members, quota)`` triples;
    the root class may be omitted.
    """

    residents: list[str]
    hospitals: list[str]
    capacity: dict[str, int]
    resident_prefs: dict[str, list[str]] = field(default_factory=dict)
    hospital_prefs: dict[str, list[str]] = field(default_factory=dict)
    classes: dict[str, list[tuple[str, list[str], int]]] = field(default_factory=dict)


def make_instance(
    residents: Iterable[str],
    hospitals: Mapping[str, int],
    resident_prefs: Mapping[str, Iterable[str]],
    hospital_prefs: Mapping[str, Iterable[str]],
    classes: Mapping[str, Iterable[tuple[str, Iterable[str], int]]] | None = None,
) -> Instance:
    """Convenience wrapper around :func:`validate_instance`.

    >>> inst = make_instance(["r"], {"h": 1}, {"r": ["h"]}, {"h": ["r"]})
    >>> inst.capacity["h"], inst.class_trees["h"].root.quota
    (1, 1)
    """
    raw = RawInstance(
        residents=list(residents),
        hospitals=list(hospitals),
        capacity=dict(hospitals),
        resident_prefs={r: list(p) for r, p in resident_prefs.items()},
        hospital_prefs={h: list(p) for h, p in hospital_prefs.items()},
        classes={
            h: [(cid, list(members), quota) for cid, members, quota in specs]
            for h, specs in (classes or {}).items()
        },
    )
    return validate_instance(raw)


def validate_instance(raw: RawInstance) -> Instance:
    """Check ``raw`` against every instance invariant and build an Instance.

    Raises :class:`InstanceValidationError` listing all issues found.
    """
    issues: list[Issue] = []

    def bad(code: str, message: str) -> None:
        issues.append(Issue(code, message))

    for kind, ids in (("resident", raw.residents), ("hospital", raw.hospitals)):
        seen: set[str] = set()
        for x in ids:
            if x in seen:
                bad(DUPLICATE_ID, f"{kind} {x!r} listed twice")
            seen.add(x)
    res_set, hosp_set = set(raw.residents), set(raw.hospitals)
    for x in sorted(res_set & hosp_set):
        bad(DUPLICATE_ID, f"{x!r} is both a resident and a hospital")

    capacity: dict[str, int] = {}
    for h in raw.hospitals:
        q = raw.capacity.get(h)
        if q is None or q < 1:
            bad(BAD_QUOTA, f"hospital {h!r} needs a positive capacity, got {q!r}")
        capacity[h] = q if q is not None else 0
    for h in raw.capacity:
        if h not in hosp_set:
            bad(UNKNOWN_ID, f"capacity given for unknown hospital {h!r}")

    def clean_prefs(owner_kind: str, prefs: dict[str, list[str]], owners: set[str],
                    targets: set[str]) -> dict[str, tuple[str, ...]]:
        out: dict[str, tuple[str, ...]] = {}
        for owner, plist in prefs.items():
            if owner not in owners:
                bad(UNKNOWN_ID, f"preference list for unknown {owner_kind} {owner!r}")
                continue
            seen: set[str] = set()
            kept = []
            for x in plist:
                if x in seen:
                    bad(DUPLICATE_PREF_ENTRY, f"{owner!r} lists {x!r} more than once")
                    continue
                seen.add(x)
                if x not in targets:
                    bad(UNKNOWN_ID, f"{owner!r} lists unknown {x!r}")
                    continue
                kept.append(x)
            out[owner] = tuple(kept)
        return out

    r_prefs = clean_prefs("resident", raw.resident_prefs, res_set, hosp_set)
    h_prefs = clean_prefs("hospital", raw.hospital_prefs, hosp_set, res_set)
    r_prefs = {r: r_prefs.get(r, ()) for r in raw.residents}
    h_prefs = {h: h_prefs.get(h, ()) for h in raw.hospitals}

    for r, plist in r_prefs.items():
        for h in plist:
            if h in h_prefs and r not in h_prefs[h]:
                bad(NON_MUTUAL_EDGE, f"{r!r} lists {h!r} but {h!r} does not list {r!r}")
    for h, plist in h_prefs.items():
        for r in plist:
            if r in r_prefs and h not in r_prefs[r]:
                bad(NON_MUTUAL_EDGE, f"{h!r} lists {r!r} but {r!r} does not list {h!r}")

    for h in raw.classes:
        if h not in hosp_set:
            bad(UNKNOWN_ID, f"classes given for unknown hospital {h!r}")

    trees: dict[str, ClassTree] = {}
    for h in raw.hospitals:
        tree = _build_tree(h, h_prefs[h], capacity[h], raw.classes.get(h, []), bad)
        if tree is not None:
            trees[h] = tree

    if issues:
        raise InstanceValidationError(issues)
    return Instance(
        residents=tuple(raw.residents),
        hospitals=tuple(raw.hospitals),
        capacity=MappingProxyType(capacity),
        resident_prefs=MappingProxyType(r_prefs),
        hospital_prefs=MappingProxyType(h_prefs),
        class_trees=MappingProxyType(trees),
    )


def _build_tree(h, preflist, capacity, specs, bad) -> ClassTree | None:
    everyone = frozenset(preflist)
    rank = {r: i for i, r in enumerate(preflist)}
    root_id = ROOT_ID
    sets: list[tuple[str, frozenset[str], int]] = []
    ok = True
    ids_seen: set[str] = set()
    for cid, members, quota in specs:
        members = frozenset(members)
        if cid in ids_seen or cid == ROOT_ID:
            bad(DUPLICATE_CLASS, f"class id {cid!r} reused at hospital {h!r}")
            ok = False
            continue
        ids_seen.add(cid)
        if not members:
            bad(EMPTY_CLASS, f"class {h}.{cid} has no members")
            ok = False
            continue
        outside = sorted(members - everyone)
        if outside:
            bad(CLASS_OUTSIDE_PREFLIST,
                f"class {h}.{cid} contains {outside} not on {h!r}'s list")
            ok = False
            continue
        if quota < 0:
            bad(BAD_QUOTA, f"class {h}.{cid} has negative quota {quota}")
            ok = False
            continue
        if members == everyone:
            if quota != capacity:
                bad(BAD_QUOTA, f"root class {h}.{cid} has quota {quota} != capacity {capacity}")
                ok = False
            elif root_id != ROOT_ID:
                bad(DUPLICATE_CLASS, f"hospital {h!r} has two root classes")
                ok = False
            else:
                root_id = cid
            continue
        sets.append((cid, members, quota))

    for i, (ci, si, _) in enumerate(sets):
        for cj, sj, _ in sets[i + 1:]:
            if si == sj:
                bad(DUPLICATE_CLASS, f"classes {h}.{ci} and {h}.{cj} have the same members")
                ok = False
            elif si & sj and not (si < sj or sj < si):
                bad(NON_LAMINAR, f"classes {h}.{ci} and {h}.{cj} properly intersect")
                ok = False
    if not ok:
        return None

    # parent = smallest strict superset; the root contains everything
    all_sets = [(root_id, everyone, capacity)] + sets
    parent: dict[str, str | None] = {root_id: None}
    for cid, members, _ in sets:
        best = None
        for pid, pmembers, _ in all_sets:
            if members < pmembers and (best is None or len(pmembers) < len(best[1])):
                best = (pid, pmembers)
        parent[cid] = best[0]

    children: dict[str, list[tuple[int, str]]] = {cid: [] for cid, _, _ in all_sets}
    info = {cid: (members, quota) for cid, members, quota in all_sets}
    for cid, members, _ in sets:
        children[parent[cid]].append((min(rank[r] for r in members), cid))

    ordered: list[HospitalClass] = []
    stack = [(root_id, 0)]
    while stack:
        cid, depth = stack.pop()
        members, quota = info[cid]
        ordered.append(HospitalClass(cid, members, quota, parent[cid], depth))
        for _, child in sorted(children[cid], reverse=True):
            stack.append((child, depth + 1))
    return ClassTree(ordered, preflist)


class Matching:
    """An immutable assignment of residents to hospitals.

    Unmatched residents are simply absent.  Matchings are hashable and
    compare by content, independent of any instance.
    """

    __slots__ = ("_assignment", "_sets", "_hash")

    def __init__(self, pairs: Iterable[tuple[str, str]] | Mapping[str, str] = ()):
        items = pairs.items() if isinstance(pairs, Mapping) else pairs
        assignment: dict[str, str] = {}
        for r, h in items:
            if r in assignment and assignment[r] != h:
                raise ValueError(f"resident {r!r} assigned to both {assignment[r]!r} and {h!r}")
            assignment[r] = h
        sets: dict[str, set[str]] = {}
        for r, h in assignment.items():
            sets.setdefault(h, set()).add(r)
        self._assignment = assignment
        self._sets = {h: frozenset(s) for h, s in sets.items()}
        self._hash = None

    @property
    def assignment(self) -> Mapping[str, str]:
        return MappingProxyType(self._assignment)

    def hospital_of(self, resident: str) -> str | None:
        return self._assignment.get(resident)

    def residents_of(self, hospital: str) -> frozenset[str]:
        return self._sets.get(hospital, frozenset())

    def pairs(self) -> set[tuple[str, str]]:
        return set(self._assignment.items())

    def sorted_pairs(self, instance: Instance) -> list[tuple[str, str]]:
        return sorted(self._assignment.items(),
                      key=lambda p: (instance.resident_index[p[0]], instance.hospital_index[p[1]]))

    def __len__(self) -> int:
        return len(self._assignment)

    def __contains__(self, pair: object) -> bool:
        if not isinstance(pair, tuple) or len(pair) != 2:
            return False
        return self._assignment.get(pair[0]) == pair[1]

    def __iter__(self) -> Iterator[tuple[str, str]]:
        return iter(self._assignment.items())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Matching):
            return NotImplemented
        return self._assignment == other._assignment

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._assignment.items()))
        return self._hash

    def __repr__(self) -> str:
        inner = ", ".join(f"({r}, {h})" for r, h in sorted(self._assignment.items()))
        return f"Matching({{{inner}}})"


def class_counts(instance: Instance, h: str, residents: Iterable[str]) -> list[int]:
    tree = instance.class_trees[h]
    counts = [0] * len(tree)
    for r in residents:
        try:
            chain = tree.chain(r)
        except KeyError:
            raise UnknownResidentError(f"{r!r} is not acceptable to {h!r}") from None
        for i in chain:
            counts[i] += 1
    return counts


def is_feasible_set(instance: Instance, h: str, residents: Iterable[str]) -> bool:
    """True iff ``residents`` respects every class quota of ``h``, root included."""
    counts = class_counts(instance, h, residents)
    return all(n <= c.quota for n, c in zip(counts, instance.class_trees[h].classes))


def is_feasible_matching(instance: Instance, matching: Matching) -> bool:
    for r, h in matching:
        if not instance.is_edge(r, h):
            return False
    for h in instance.hospitals:
        if not is_feasible_set(instance, h, matching.residents_of(h)):
            return False
    return True


def check_feasible(instance: Instance, *matchings: Matching) -> None:
    for m in matchings:
        if not is_feasible_matching(instance, m):
            raise InfeasibleMatchingError(f"{m!r} is not a feasible matching")


def deepest_saturated(instance: Instance, h: str, counts: list[int], r: str) -> int | None:
    """Index of the deepest class containing ``r`` that is at its quota."""
    classes = instance.class_trees[h].classes
    for i in reversed(instance.class_trees[h].chain(r)):
        if counts[i] >= classes[i].quota:
            return i
    return None


def can_admit(instance: Instance, h: str, current: frozenset[str] | set[str], r: str) -> bool:
    """Blocking condition on the hospital side.

    ``current ∪ {r}`` is feasible, or some member worse than ``r`` can be
    swapped out for ``r``.  Classes containing ``r`` form a chain, so only
    the deepest saturated one matters: dropping a member of it relieves it
    and every saturated ancestor.
    """
    counts = class_counts(instance, h, current)
    d = deepest_saturated(instance, h, counts, r)
    if d is None:
        return True
    members = instance.class_trees[h].classes[d].members
    inside = [x for x in current if x in members]
    if not inside:
        return False
    worst = max(inside, key=lambda x: instance.rank(h, x))
    return instance.prefers(h, r, worst)


def blocking_pairs(instance: Instance, matching: Matching) -> list[tuple[str, str]]:
    """All pairs blocking ``matching``, sorted by (resident, hospital) index."""
    check_feasible(instance, matching)
    out = []
    for r in instance.residents:
        current = matching.hospital_of(r)
        prefs = instance.resident_prefs[r]
        better = prefs if current is None else prefs[: instance.rank(r, current)]
        found = [h for h in better if can_admit(instance, h, matching.residents_of(h), r)]
        found.sort(key=instance.hospital_index.__getitem__)
        out.extend((r, h) for h in found)
    return out


def is_stable(instance: Instance, matching: Matching) -> bool:
    return not blocking_pairs(instance, matching)
