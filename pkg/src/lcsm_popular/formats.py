"""Text and JSON formats for instances, matchings and SPA instances.

Instance files are line oriented::

    residents: r1 r2 r3 r4
    hospitals: h1:2 h2:1 h3:1          # id:capacity
    pref r2: h2 h1 h3                  # one line per resident
    hpref h1: r2 r3 r4 r1              # one line per hospital
    class h1.c1 quota 1: r1 r2         # root class implicit

A ``#`` starts a comment only at the start of a line or after whitespace,
so level-copy names such as ``r1#0`` survive.  Matching files hold one
``resident hospital`` pair per line.
"""

from __future__ import annotations

import re
from typing import Any

from .errors import ParseError
from .model import ROOT_ID, Instance, Matching, RawInstance, validate_instance
from .reduction import SpaInstance

_COMMENT = re.compile(r"(^|\s)#.*$")


def _lines(text: str):
    for no, line in enumerate(text.splitlines(), start=1):
        line = _COMMENT.sub("", line).strip()
        if line:
            yield no, line


def _split_header(line: str, no: int) -> tuple[str, list[str]]:
    head, sep, rest = line.partition(":")
    if not sep:
        raise ParseError(f"expected ':' in {line!r}", no)
    return head.strip(), rest.split()


def _int(token: str, no: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"{what} must be an integer, got {token!r}", no) from None


def parse_raw_instance(text: str) -> RawInstance:
    """Syntax-level parse; semantic checks happen in :func:`validate_instance`."""
    residents = hospitals = None
    capacity: dict[str, int] = {}
    r_prefs: dict[str, list[str]] = {}
    h_prefs: dict[str, list[str]] = {}
    classes: dict[str, list[tuple[str, list[str], int]]] = {}

    for no, line in _lines(text):
        head, tokens = _split_header(line, no)
        words = head.split()
        if head == "residents":
            if residents is not None:
                raise ParseError("second 'residents:' line", no)
            residents = tokens
        elif head == "hospitals":
            if hospitals is not None:
                raise ParseError("second 'hospitals:' line", no)
            hospitals = []
            for tok in tokens:
                h, sep, q = tok.rpartition(":")
                if not sep or not h:
                    raise ParseError(f"hospital entry {tok!r} must look like id:capacity", no)
                hospitals.append(h)
                capacity[h] = _int(q, no, "capacity")
        elif len(words) == 2 and words[0] in ("pref", "hpref"):
            target = r_prefs if words[0] == "pref" else h_prefs
            if words[1] in target:
                raise ParseError(f"second preference line for {words[1]!r}", no)
            target[words[1]] = tokens
        elif len(words) == 4 and words[0] == "class" and words[2] == "quota":
            h, dot, cid = words[1].rpartition(".")
            if not dot or not h or not cid:
                raise ParseError(f"class name {words[1]!r} must look like hospital.class", no)
            classes.setdefault(h, []).append((cid, tokens, _int(words[3], no, "quota")))
        else:
            raise ParseError(f"unrecognised line {line!r}", no)

    if residents is None or hospitals is None:
        raise ParseError("instance needs both 'residents:' and 'hospitals:' lines")
    return RawInstance(residents, hospitals, capacity, r_prefs, h_prefs, classes)


def parse_instance(text: str) -> Instance:
    return validate_instance(parse_raw_instance(text))


def _members(instance: Instance, cls) -> list[str]:
    return sorted(cls.members, key=instance.resident_index.__getitem__)


def serialize_instance(instance: Instance) -> str:
    """Canonical text form; ``parse_instance`` inverts it exactly."""
    out = [
        "residents: " + " ".join(instance.residents),
        "hospitals: " + " ".join(f"{h}:{instance.capacity[h]}" for h in instance.hospitals),
    ]
    for r in instance.residents:
        out.append(" ".join([f"pref {r}:", *instance.resident_prefs[r]]))
    for h in instance.hospitals:
        out.append(" ".join([f"hpref {h}:", *instance.hospital_prefs[h]]))
    for h in instance.hospitals:
        tree = instance.class_trees[h]
        for c in tree.classes:
            if c.parent is None and c.cid == ROOT_ID:
                continue
            members = _members(instance, c)
            out.append(" ".join([f"class {h}.{c.cid} quota {c.quota}:", *members]))
    return "\n".join(out) + "\n"


def parse_matching(text: str, instance: Instance) -> Matching:
    pairs = {}
    for no, line in _lines(text):
        tokens = line.split()
        if len(tokens) != 2:
            raise ParseError(f"expected 'resident hospital', got {line!r}", no)
        r, h = tokens
        if not instance.is_resident(r):
            raise ParseError(f"unknown resident {r!r}", no)
        if not instance.is_hospital(h):
            raise ParseError(f"unknown hospital {h!r}", no)
        if r in pairs:
            raise ParseError(f"resident {r!r} matched twice", no)
        pairs[r] = h
    return Matching(pairs)


def serialize_matching(matching: Matching, instance: Instance) -> str:
    return "".join(f"{r} {h}\n" for r, h in matching.sorted_pairs(instance))


def serialize_spa(spa: SpaInstance) -> str:
    out = [
        "students: " + " ".join(spa.students),
        "lecturers: " + " ".join(f"{lec}:{q}" for lec, q in spa.lecturers.items()),
        "projects: " + " ".join(f"{p.pid}:{p.capacity}@{p.lecturer}" for p in spa.projects),
    ]
    for s in spa.students:
        out.append(" ".join([f"pref {s}:", *spa.student_prefs[s]]))
    for lec in spa.lecturers:
        out.append(" ".join([f"lpref {lec}:", *spa.lecturer_prefs[lec]]))
    return "\n".join(out) + "\n"


def instance_to_dict(instance: Instance) -> dict[str, Any]:
    return {
        "residents": list(instance.residents),
        "hospitals": {h: instance.capacity[h] for h in instance.hospitals},
        "resident_prefs": {r: list(p) for r, p in instance.resident_prefs.items()},
        "hospital_prefs": {h: list(p) for h, p in instance.hospital_prefs.items()},
        "classes": {
            h: [
                {"id": c.cid, "quota": c.quota, "parent": c.parent,
                 "members": _members(instance, c)}
                for c in instance.class_trees[h]
            ]
            for h in instance.hospitals
        },
    }


def matching_to_list(matching: Matching, instance: Instance) -> list[list[str]]:
    return [list(p) for p in matching.sorted_pairs(instance)]


def spa_to_dict(spa: SpaInstance) -> dict[str, Any]:
    return {
        "students": list(spa.students),
        "lecturers": dict(spa.lecturers),
        "projects": [{"id": p.pid, "lecturer": p.lecturer, "capacity": p.capacity}
                     for p in spa.projects],
        "student_prefs": {s: list(p) for s, p in spa.student_prefs.items()},
        "lecturer_prefs": {lec: list(p) for lec, p in spa.lecturer_prefs.items()},
    }
