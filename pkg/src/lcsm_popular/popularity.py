"""Comparing two feasible matchings by votes.

Residents vote by comparing their two partners.  A hospital gets as many
votes as its capacity; to cast them it pairs the residents it gains with
the residents it loses inside the most refined classes first
(:func:`find_correspondence`) and compares the pairs.  Unpaired residents
vote by presence.

The symmetric difference of the two matchings splits into alternating
paths and cycles (:func:`decompose`), and the vote margin can be read off
labels on the rival's edges.  :func:`check_characterization` looks for the
three structures that let a rival beat a matching.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass

from .errors import CorrMismatchError, InfeasibleMatchingError, NotANeighborError
from .model import Instance, Matching, check_feasible, is_feasible_set

Corr = dict[str, "str | None"]


def _side_sets(matching: Matching, rival: Matching, h: str) -> tuple[set[str], set[str]]:
    a, b = matching.residents_of(h), rival.residents_of(h)
    return set(a - b), set(b - a)


def check_feasible_at(instance: Instance, h: str, *matchings: Matching) -> None:
    for m in matchings:
        if not is_feasible_set(instance, h, m.residents_of(h)):
            raise InfeasibleMatchingError(f"{h!r} holds an infeasible set in {m!r}")


def find_correspondence(
    instance: Instance,
    h: str,
    matching: Matching,
    rival: Matching,
    *,
    pick: str = "deepest",
) -> Corr:
    """Pair residents ``h`` loses with residents it gains, class by class.

    Returns a map over ``M(h) ⊕ M'(h)``; unpaired residents map to ``None``.
    While both sides have unpaired residents, a most refined class holding
    residents from both sides is chosen and its members are paired by rank
    (best with best, second with second, ...).

    ``pick="deepest"`` chooses the deepest qualifying class, ties broken by
    tree preorder.  ``pick="reverse"`` takes the first qualifying class in
    reverse preorder instead; it exists to check that the result does not
    depend on the tie-break.
    """
    tree = instance.class_trees[h]
    check_feasible_at(instance, h, matching, rival)
    lost, gained = _side_sets(matching, rival, h)
    corr: Corr = {r: None for r in lost | gained}
    rank = lambda r: instance.rank(h, r)  # noqa: E731
    order = list(tree.classes) if pick == "deepest" else list(reversed(tree.classes))

    while lost and gained:
        chosen = None
        for c in order:
            if c.members.isdisjoint(lost) or c.members.isdisjoint(gained):
                continue
            if pick != "deepest":
                chosen = c
                break
            if chosen is None or c.depth > chosen.depth:
                chosen = c
        xs = sorted((r for r in lost if r in chosen.members), key=rank)
        ys = sorted((r for r in gained if r in chosen.members), key=rank)
        for a, b in zip(xs, ys):
            corr[a], corr[b] = b, a
            lost.discard(a)
            gained.discard(b)
    return corr


def vote(instance: Instance, u: str, x: str | None, y: str | None) -> int:
    """+1 if ``u`` prefers ``x`` to ``y``, -1 if the reverse, 0 if equal.

    ``None`` stands for being unmatched, which every neighbour beats.
    """
    for v in (x, y):
        if v is not None and instance.rank(u, v) is None:
            raise NotANeighborError(f"{v!r} is not a neighbour of {u!r}")
    if x == y:
        return 0
    if x is None:
        return -1
    if y is None:
        return 1
    return 1 if instance.prefers(u, x, y) else -1


def hospital_vote(instance: Instance, h: str, matching: Matching, rival: Matching,
                  corr: Mapping[str, str | None]) -> int:
    """Net votes of ``h`` for ``rival`` over ``matching`` under ``corr``."""
    lost, gained = _side_sets(matching, rival, h)
    if set(corr) != lost | gained:
        raise CorrMismatchError(f"corr for {h!r} does not cover M(h) xor M'(h)")
    for a, b in corr.items():
        if b is None:
            continue
        if corr.get(b) != a or (a in lost) == (b in lost):
            raise CorrMismatchError(f"corr pair ({a!r}, {b!r}) at {h!r} is inconsistent")
    total = len(rival.residents_of(h)) - len(matching.residents_of(h))
    for r in gained:
        if corr[r] is not None:
            total += vote(instance, h, r, corr[r])
    return total


def hospital_vote_positional(instance: Instance, h: str, matching: Matching,
                             rival: Matching) -> int:
    """Classification-blind hospital vote: k-th best lost vs k-th best gained.

    Leftover residents on the larger side count one vote each by presence.
    """
    check_feasible_at(instance, h, matching, rival)
    lost, gained = _side_sets(matching, rival, h)
    xs = sorted(lost, key=lambda r: instance.rank(h, r))
    ys = sorted(gained, key=lambda r: instance.rank(h, r))
    total = len(ys) - len(xs)
    for a, b in zip(xs, ys):
        total += vote(instance, h, b, a)
    return total


@dataclass(frozen=True)
class VoteTally:
    """Votes for ``rival`` over ``matching``; ``delta`` is the net margin."""

    per_resident: dict[str, int]
    per_hospital: dict[str, int]
    unused: dict[str, tuple[int, int]]
    delta: int


def delta(instance: Instance, matching: Matching, rival: Matching) -> VoteTally:
    """Tally of the votes ``rival`` gets over ``matching``.

    ``unused[h]`` records ``(|M(h) ∩ M'(h)|, q(h) - max(|M(h)|, |M'(h)|))``,
    the votes ``h`` does not cast.
    """
    check_feasible(instance, matching, rival)
    per_resident = {
        r: vote(instance, r, rival.hospital_of(r), matching.hospital_of(r))
        for r in instance.residents
    }
    per_hospital = {}
    unused = {}
    for h in instance.hospitals:
        corr = find_correspondence(instance, h, matching, rival)
        per_hospital[h] = hospital_vote(instance, h, matching, rival, corr)
        a, b = matching.residents_of(h), rival.residents_of(h)
        unused[h] = (len(a & b), instance.capacity[h] - max(len(a), len(b)))
    total = sum(per_resident.values()) + sum(per_hospital.values())
    return VoteTally(per_resident, per_hospital, unused, total)


def delta_positional(instance: Instance, matching: Matching, rival: Matching) -> int:
    """Net margin of ``rival`` when hospitals use the positional scheme."""
    check_feasible(instance, matching, rival)
    total = sum(vote(instance, r, rival.hospital_of(r), matching.hospital_of(r))
                for r in instance.residents)
    total += sum(hospital_vote_positional(instance, h, matching, rival)
                 for h in instance.hospitals)
    return total


@dataclass(frozen=True, order=True)
class Edge:
    """An edge of ``M ⊕ M'``; ``rival`` is True for edges of ``M' \\ M``."""

    resident: str
    hospital: str
    rival: bool

    @property
    def pair(self) -> tuple[str, str]:
        return self.resident, self.hospital


def _joint(e: Edge, f: Edge) -> str:
    if e.resident == f.resident:
        return e.resident
    if e.hospital == f.hospital:
        return e.hospital
    raise ValueError(f"edges {e} and {f} are not adjacent")


@dataclass(frozen=True)
class AlternatingStructure:
    """An alternating path or cycle, stored as its edges in traversal order.

    A hospital may occur several times; each occurrence is a position in
    :meth:`vertices`.
    """

    edges: tuple[Edge, ...]
    cycle: bool = False

    def vertices(self) -> list[str]:
        es = self.edges
        if not es:
            return []
        if len(es) == 1:
            start = es[0].resident
        elif self.cycle:
            start = _joint(es[-1], es[0])
        else:
            j = _joint(es[0], es[1])
            start = es[0].hospital if j == es[0].resident else es[0].resident
        seq = [start]
        for e in es:
            seq.append(e.hospital if seq[-1] == e.resident else e.resident)
        return seq

    def terminals(self) -> list[tuple[str, Edge]]:
        """(vertex, incident edge) at each end of a path; empty for cycles."""
        if self.cycle or not self.edges:
            return []
        vs = self.vertices()
        return [(vs[0], self.edges[0]), (vs[-1], self.edges[-1])]

    def hospital_slots(self) -> list[tuple[str, Edge | None, Edge | None]]:
        """Each hospital occurrence as ``(hospital, M edge, M' edge)``.

        Either edge is ``None`` when the occurrence is a path end.
        """
        vs, es = self.vertices(), self.edges
        k = len(es)
        slots = []
        for i in range(k if self.cycle else k + 1):
            around = []
            if i > 0 or self.cycle:
                around.append(es[i - 1])
            if i < k:
                around.append(es[i])
            if not around or around[0].hospital != vs[i]:
                continue
            m_edge = next((e for e in around if not e.rival), None)
            r_edge = next((e for e in around if e.rival), None)
            slots.append((vs[i], m_edge, r_edge))
        return slots

    def __len__(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class Decomposition:
    """Alternating structures of ``M ⊕ M'`` with labels on the ``M'`` edges.

    ``labels[(r, h)]`` is ``(resident vote, hospital vote)`` for the rival
    edge ``(r, h)``.  ``endpoints`` is the multiset of path ends whose only
    incident edge on the path belongs to ``M``.
    """

    structures: tuple[AlternatingStructure, ...]
    labels: Mapping[tuple[str, str], tuple[int, int]]
    endpoints: tuple[str, ...]

    def rewritten_delta(self) -> int:
        """Net margin of the rival computed from labels and endpoints."""
        total = -len(self.endpoints)
        for s in self.structures:
            for e in s.edges:
                if e.rival:
                    total += sum(self.labels[e.pair])
        return total


def _matched_endpoints(structures: Iterable[AlternatingStructure]) -> tuple[str, ...]:
    out = []
    for s in structures:
        for v, e in s.terminals():
            if not e.rival:
                out.append(v)
    return tuple(out)


def decompose(instance: Instance, matching: Matching, rival: Matching) -> Decomposition:
    """Split ``matching ⊕ rival`` into maximal alternating paths and cycles.

    Through a resident the structure continues along its other edge;
    through a hospital it continues to the correspondence partner of the
    resident it arrived with.  Each edge ends up in exactly one structure.
    Seeds are taken in (resident, hospital) index order.
    """
    check_feasible(instance, matching, rival)
    m_edge: dict[str, Edge] = {}
    r_edge: dict[str, Edge] = {}
    for r in instance.residents:
        a, b = matching.hospital_of(r), rival.hospital_of(r)
        if a == b:
            continue
        if a is not None:
            m_edge[r] = Edge(r, a, False)
        if b is not None:
            r_edge[r] = Edge(r, b, True)

    via_resident: dict[Edge, Edge] = {}
    via_hospital: dict[Edge, Edge] = {}
    for r in m_edge.keys() & r_edge.keys():
        via_resident[m_edge[r]] = r_edge[r]
        via_resident[r_edge[r]] = m_edge[r]

    labels: dict[tuple[str, str], tuple[int, int]] = {}
    for h in instance.hospitals:
        corr = find_correspondence(instance, h, matching, rival)
        for x, y in corr.items():
            if x in rival.residents_of(h):
                labels[(x, h)] = (
                    vote(instance, x, h, matching.hospital_of(x)),
                    vote(instance, h, x, y),
                )
                if y is not None:
                    via_hospital[r_edge[x]] = m_edge[y]
                    via_hospital[m_edge[y]] = r_edge[x]

    links = {"r": via_resident, "h": via_hospital}

    def walk(start: Edge, kind: str) -> tuple[list[Edge], bool]:
        seq = [start]
        while True:
            nxt = links[kind].get(seq[-1])
            if nxt is None:
                return seq, False
            if nxt == start:
                return seq, True
            seq.append(nxt)
            kind = "h" if kind == "r" else "r"

    seeds = sorted(
        list(m_edge.values()) + list(r_edge.values()),
        key=lambda e: (instance.resident_index[e.resident], instance.hospital_index[e.hospital]),
    )
    seen: set[Edge] = set()
    structures = []
    for seed in seeds:
        if seed in seen:
            continue
        forward, closed = walk(seed, "h")
        if closed:
            edges = forward
        else:
            back, _ = walk(seed, "r")
            edges = back[::-1] + forward[1:]
        seen.update(edges)
        structures.append(AlternatingStructure(tuple(edges), closed))

    return Decomposition(tuple(structures), labels, _matched_endpoints(structures))


def reduced_decomposition(dec: Decomposition) -> Decomposition:
    """Drop every rival edge labelled (-1, -1) and split structures there."""

    def dead(e: Edge) -> bool:
        return e.rival and dec.labels[e.pair] == (-1, -1)

    out = []
    for s in dec.structures:
        idx = [i for i, e in enumerate(s.edges) if dead(e)]
        if not idx:
            out.append(s)
            continue
        edges = list(s.edges)
        if s.cycle:
            k = idx[0]
            edges = edges[k + 1:] + edges[: k + 1]
        piece: list[Edge] = []
        for e in edges:
            if dead(e):
                if piece:
                    out.append(AlternatingStructure(tuple(piece)))
                piece = []
            else:
                piece.append(e)
        if piece:
            out.append(AlternatingStructure(tuple(piece)))
    kept = {e.pair for s in out for e in s.edges if e.rival}
    labels = {k: v for k, v in dec.labels.items() if k in kept}
    return Decomposition(tuple(out), labels, _matched_endpoints(out))


def swap(matching: Matching, structure: AlternatingStructure) -> Matching:
    """``matching`` with the structure's ``M`` edges replaced by its ``M'`` edges."""
    assignment = dict(matching.assignment)
    for e in structure.edges:
        if not e.rival and assignment.get(e.resident) == e.hospital:
            del assignment[e.resident]
    for e in structure.edges:
        if e.rival:
            assignment[e.resident] = e.hospital
    return Matching(assignment)


@dataclass(frozen=True)
class Violation:
    """A structure that lets the rival beat the matching.

    ``kind`` is 1 for a cycle with a (1, 1) edge, 2 for a path with a
    (1, 1) edge and an end on a rival edge (a resident unmatched in ``M``
    or an under-subscribed hospital), 3 for a path with both ends on ``M``
    edges and at least two (1, 1) edges.
    """

    kind: int
    structure: AlternatingStructure
    good_edges: tuple[tuple[str, str], ...]


def check_characterization(instance: Instance, matching: Matching,
                           rival: Matching) -> list[Violation]:
    reduced = reduced_decomposition(decompose(instance, matching, rival))
    found = []
    for s in reduced.structures:
        good = tuple(e.pair for e in s.edges if e.rival and reduced.labels[e.pair] == (1, 1))
        if not good:
            continue
        if s.cycle:
            found.append(Violation(1, s, good))
        elif any(e.rival for _, e in s.terminals()):
            found.append(Violation(2, s, good))
        elif len(good) >= 2:
            found.append(Violation(3, s, good))
    return found
