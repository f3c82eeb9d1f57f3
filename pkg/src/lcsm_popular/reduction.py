"""The layered instance and the translations between it and the original.

Every resident ``r`` gets ``s`` level copies ``r#0 .. r#(s-1)`` chained by
``s - 1`` capacity-one dummy hospitals ``d#r#0 .. d#r#(s-2)``.  Real
hospitals rank higher levels first, so a stable matching of the layered
instance pushes residents that would otherwise stay unmatched up the levels, where
they can displace lower-level residents.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import BadLevelCountError, InvariantViolationError, NotPartitionError
from .model import Instance, Matching, RawInstance, validate_instance
from .popularity import AlternatingStructure, Edge, vote


def copy_name(r: str, level: int) -> str:
    return f"{r}#{level}"


def dummy_name(r: str, level: int) -> str:
    return f"d#{r}#{level}"


@dataclass(frozen=True)
class LayeredInstance:
    """A layered instance with the bookkeeping to move back to its base."""

    base: Instance
    s: int
    instance: Instance

    def copies(self, r: str) -> list[str]:
        return [copy_name(r, i) for i in range(self.s)]

    def dummies(self, r: str) -> list[str]:
        return [dummy_name(r, i) for i in range(self.s - 1)]

    def is_dummy(self, h: str) -> bool:
        return h not in self.base.hospital_index

    def origin(self, copy: str) -> tuple[str, int]:
        """``(resident, level)`` of a level copy."""
        r, _, level = copy.rpartition("#")
        return r, int(level)


def build_layered(instance: Instance, s: int) -> LayeredInstance:
    """Construct the ``s``-level instance for ``2 <= s <= max(|R|, 2)``.

    Level 0 lists the base preferences then its dummy; middle levels put the
    previous dummy first and the next dummy last; the top level starts with
    the last dummy.  Dummy ``d#r#i`` prefers ``r#i`` to ``r#(i+1)``.  Real
    hospitals keep their capacity and list level ``s-1`` copies first, down
    to level 0, each block in the original order.  Each class is lifted to
    all copies of its members with the same quota.
    """
    n1 = len(instance.residents)
    if not 2 <= s <= max(n1, 2):
        raise BadLevelCountError(f"s must lie in [2, {max(n1, 2)}], got {s}")
    for x in instance.residents + instance.hospitals:
        if "#" in x:
            raise ValueError(f"identifier {x!r} contains '#', reserved for level copies")

    residents: list[str] = []
    hospitals: list[str] = list(instance.hospitals)
    capacity = dict(instance.capacity)
    r_prefs: dict[str, list[str]] = {}
    h_prefs: dict[str, list[str]] = {}
    classes: dict[str, list[tuple[str, list[str], int]]] = {}

    for level in range(s):
        for r in instance.residents:
            base = list(instance.resident_prefs[r])
            before = [dummy_name(r, level - 1)] if level > 0 else []
            after = [dummy_name(r, level)] if level < s - 1 else []
            residents.append(copy_name(r, level))
            r_prefs[copy_name(r, level)] = before + base + after
    for r in instance.residents:
        for i in range(s - 1):
            d = dummy_name(r, i)
            hospitals.append(d)
            capacity[d] = 1
            h_prefs[d] = [copy_name(r, i), copy_name(r, i + 1)]

    for h in instance.hospitals:
        base = instance.hospital_prefs[h]
        h_prefs[h] = [copy_name(r, level) for level in reversed(range(s)) for r in base]
        classes[h] = [
            (c.cid, [copy_name(r, level) for r in c.members for level in range(s)], c.quota)
            for c in instance.class_trees[h].classes[1:]
        ]

    raw = RawInstance(residents, hospitals, capacity, r_prefs, h_prefs, classes)
    return LayeredInstance(instance, s, validate_instance(raw))


def check_invariants(layered: LayeredInstance, ms: Matching) -> list[str]:
    """Violations of the three structural properties of a stable layered matching.

    dummy: every dummy ``d#r#i`` holds ``r#i`` or ``r#(i+1)``.
    single-real: at most one copy of ``r`` sits at a real hospital.
    levels: if ``r#i`` sits at a real hospital, lower copies hold their own
    dummy and higher copies hold the dummy below them; if none does, all
    copies but the top one hold their own dummy and the top one is free.
    """
    problems = []
    s = layered.s
    for r in layered.base.residents:
        copies = layered.copies(r)
        dummies = layered.dummies(r)
        for i, d in enumerate(dummies):
            held = ms.residents_of(d)
            if len(held) != 1 or not held <= {copies[i], copies[i + 1]}:
                problems.append(f"dummy: {d} holds {sorted(held)}")
        real = [i for i, c in enumerate(copies)
                if ms.hospital_of(c) is not None and not layered.is_dummy(ms.hospital_of(c))]
        if len(real) > 1:
            problems.append(f"single-real: copies {[copies[i] for i in real]} all at real hospitals")
            continue
        top = real[0] if real else s - 1
        for j in range(s):
            got = ms.hospital_of(copies[j])
            if j < top:
                want = dummies[j]
            elif j > top:
                want = dummies[j - 1]
            else:
                continue
            if got != want:
                problems.append(f"levels: {copies[j]} holds {got}, expected {want}")
        if not real and ms.hospital_of(copies[s - 1]) is not None:
            problems.append(f"levels: {copies[s - 1]} should be unmatched")
    return problems


def map_down(layered: LayeredInstance, ms: Matching) -> Matching:
    """Project a layered matching onto the base instance: keep each resident's copy at a real hospital."""
    pairs = {}
    for c, h in ms:
        if layered.is_dummy(h):
            continue
        r, _ = layered.origin(c)
        if r in pairs:
            raise InvariantViolationError(f"two copies of {r!r} hold real hospitals")
        pairs[r] = h
    return Matching(pairs)


def lift_resident(layered: LayeredInstance, ms: Matching, r: str) -> str:
    """The copy of ``r`` matched to a real hospital, else the top copy."""
    for c in layered.copies(r):
        h = ms.hospital_of(c)
        if h is not None and not layered.is_dummy(h):
            return c
    return copy_name(r, layered.s - 1)


def map_up(layered: LayeredInstance, ms: Matching,
           structure: AlternatingStructure) -> AlternatingStructure:
    """Replace every resident of ``structure`` by its lifted copy."""
    lifted = tuple(
        Edge(lift_resident(layered, ms, e.resident), e.hospital, e.rival)
        for e in structure.edges
    )
    return AlternatingStructure(lifted, structure.cycle)


def lifted_labels(layered: LayeredInstance, ms: Matching,
                  lifted: AlternatingStructure) -> dict[tuple[str, str], tuple[int, int]]:
    """Labels of the rival edges of a lifted structure, measured against the layered matching.

    At each hospital occurrence the rival resident is compared with the
    layered-matching resident next to it on the structure (or with nobody at an end).
    """
    g = layered.instance
    labels = {}
    for h, m_edge, r_edge in lifted.hospital_slots():
        if r_edge is None:
            continue
        c = r_edge.resident
        partner = m_edge.resident if m_edge is not None else None
        labels[r_edge.pair] = (vote(g, c, h, ms.hospital_of(c)), vote(g, h, c, partner))
    return labels


def level_transitions(layered: LayeredInstance, lifted: AlternatingStructure):
    """Yield ``(hospital, rival copy, held copy)`` at every inner hospital occurrence."""
    for h, m_edge, r_edge in lifted.hospital_slots():
        if m_edge is not None and r_edge is not None:
            yield h, r_edge.resident, m_edge.resident


@dataclass(frozen=True)
class SpaProject:
    pid: str
    lecturer: str
    capacity: int


@dataclass(frozen=True)
class SpaInstance:
    """Student/project allocation data: students rank projects, lecturers own them."""

    students: tuple[str, ...]
    lecturers: dict[str, int]
    projects: tuple[SpaProject, ...]
    student_prefs: dict[str, tuple[str, ...]]
    lecturer_prefs: dict[str, tuple[str, ...]]


def project_name(h: str, cid: str) -> str:
    return f"{h}.{cid}"


def pcsm_to_spa(instance: Instance) -> SpaInstance:
    """Rewrite a partition-classified instance as a student/project instance.

    Each hospital becomes a lecturer with the same capacity and list; each
    of its classes becomes a project owned by it (a hospital with no
    classes gets one project covering its whole list).  A student ranks the
    project of its class at each hospital, in its own hospital order.
    """
    if not instance.is_partition():
        raise NotPartitionError("classes do not partition every hospital's list")
    projects = []
    home: dict[tuple[str, str], str] = {}
    for h in instance.hospitals:
        tree = instance.class_trees[h]
        parts = tree.classes[1:] or tree.classes[:1]
        for c in parts:
            pid = project_name(h, c.cid)
            projects.append(SpaProject(pid, h, c.quota))
            for r in c.members:
                home[(r, h)] = pid
    return SpaInstance(
        students=tuple(instance.residents),
        lecturers={h: instance.capacity[h] for h in instance.hospitals},
        projects=tuple(projects),
        student_prefs={r: tuple(home[(r, h)] for h in instance.resident_prefs[r])
                       for r in instance.residents},
        lecturer_prefs={h: tuple(instance.hospital_prefs[h]) for h in instance.hospitals},
    )

