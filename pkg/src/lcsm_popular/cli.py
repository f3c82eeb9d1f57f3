"""Command-line front end.

Exit codes: 0 when the matching is solved or the property holds, 1 when a
verified property fails (a report is printed), 2 on usage, input or guard
errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any

from . import formats
from .errors import LCSMError
from .generator import GeneratorConfig, generate
from .model import Instance, Matching, blocking_pairs, is_feasible_set
from .oracle import (
    DEFAULT_GUARD,
    GUARD_ENV,
    POPULAR_SIZE_GUARD,
    FeasibleTable,
    brute_is_popular,
    brute_max_cardinality,
    brute_max_popular_size,
    brute_unbeaten_among_maxcard,
    guard_from_env,
)
from .popularity import check_characterization, decompose, delta
from .reduction import build_layered, pcsm_to_spa
from .solvers import max_cardinality_popular, popular_among_max_cardinality
from .stable import solve_stable

log = logging.getLogger("lcsm_popular")

SOLVERS = {
    "stable": solve_stable,
    "max-popular": max_cardinality_popular,
    "popular-maxcard": popular_among_max_cardinality,
}


class Outcome:
    """What a verb produced: an exit code, text lines, and the same content as data."""

    def __init__(self, code: int, lines: list[str], data: dict[str, Any]):
        self.code, self.lines, self.data = code, lines, data


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _instance(path: str) -> Instance:
    return formats.parse_instance(_read(path))


def _matching(path: str, instance: Instance) -> Matching:
    return formats.parse_matching(_read(path), instance)


def _guard(default):
    guard = guard_from_env(default)
    if guard != default:
        log.warning("%s overrides oracle guard: %s", GUARD_ENV, guard)
    return guard


def _pairs(m: Matching, inst: Instance) -> str:
    return " ".join(f"({r},{h})" for r, h in m.sorted_pairs(inst)) or "(empty)"


def _signed(x: int) -> str:
    return f"{x:+d}" if x else "0"


def _infeasible_at(inst: Instance, m: Matching) -> list[str]:
    bad = [h for h in inst.hospitals if not is_feasible_set(inst, h, m.residents_of(h))]
    for r, h in m:
        if not inst.is_edge(r, h) and h not in bad:
            bad.append(h)
    return bad


def _structure_text(s) -> str:
    shape = "cycle" if s.cycle else "path"
    return f"{shape} " + " - ".join(s.vertices())


# verbs


def cmd_solve(args) -> Outcome:
    inst = _instance(args.instance)
    m = SOLVERS[args.kind](inst)
    lines = formats.serialize_matching(m, inst).splitlines()
    return Outcome(0, lines, {"kind": args.kind, "size": len(m),
                              "matching": formats.matching_to_list(m, inst)})


def cmd_verify(args) -> Outcome:
    inst = _instance(args.instance)
    m = _matching(args.matching, inst)
    rival = _matching(args.rival, inst) if args.rival else None
    bad = _infeasible_at(inst, m)
    if rival is not None:
        bad += [h for h in _infeasible_at(inst, rival) if h not in bad]
    if bad:
        return Outcome(1, [f"infeasible at: {' '.join(bad)}"],
                       {"property": args.property, "holds": False, "infeasible_at": bad})
    if args.property == "feasible":
        return Outcome(0, ["feasible"], {"property": "feasible", "holds": True})

    if args.property == "stable":
        pairs = blocking_pairs(inst, m)
        lines = ["stable"] if not pairs else ["not stable; blocking pairs:"] + [
            f"  ({r},{h})" for r, h in pairs]
        return Outcome(1 if pairs else 0, lines,
                       {"property": "stable", "holds": not pairs,
                        "blocking_pairs": [list(p) for p in pairs]})

    if args.property == "popular":
        if rival is not None:
            d = delta(inst, m, rival).delta
            ok = d <= 0
            lines = [f"delta={d}", "not beaten by rival" if ok else "beaten by rival"]
            return Outcome(0 if ok else 1, lines,
                           {"property": "popular", "holds": ok, "delta": d})
        ok, witness = brute_is_popular(inst, m, _guard(DEFAULT_GUARD), threads=args.threads)
        data: dict[str, Any] = {"property": "popular", "holds": ok}
        if ok:
            return Outcome(0, ["popular"], data)
        d = delta(inst, m, witness).delta
        data.update(witness=formats.matching_to_list(witness, inst), delta=d)
        return Outcome(1, ["not popular", f"witness: {_pairs(witness, inst)}", f"delta={d}"],
                       data)

    # charc
    rivals = [rival] if rival is not None else list(
        FeasibleTable(inst, _guard(DEFAULT_GUARD), args.threads))
    found = []
    for x in rivals:
        for v in check_characterization(inst, m, x):
            found.append((x, v))
    lines = ["no violating structure"] if not found else []
    out = []
    for x, v in found:
        lines.append(f"kind {v.kind} against {_pairs(x, inst)}: {_structure_text(v.structure)}")
        out.append({"rival": formats.matching_to_list(x, inst), "kind": v.kind,
                    "vertices": v.structure.vertices(), "cycle": v.structure.cycle,
                    "good_edges": [list(e) for e in v.good_edges]})
    return Outcome(1 if found else 0, lines,
                   {"property": "charc", "holds": not found, "violations": out})


def cmd_compare(args) -> Outcome:
    inst = _instance(args.instance)
    a, b = _matching(args.a, inst), _matching(args.b, inst)
    tally = delta(inst, a, b)
    dec = decompose(inst, a, b)
    lines = [f"delta={tally.delta}",
             "residents: " + " ".join(f"{r}:{_signed(v)}" for r, v in tally.per_resident.items()),
             "hospitals: " + " ".join(f"{h}:{_signed(v)}" for h, v in tally.per_hospital.items()),
             "structures:"]
    structures = []
    for s in dec.structures:
        lines.append("  " + _structure_text(s))
        labels = [(e.pair, dec.labels[e.pair]) for e in s.edges if e.rival]
        for (r, h), (x, y) in labels:
            lines.append(f"    ({r},{h}) label ({_signed(x)},{_signed(y)})")
        structures.append({"vertices": s.vertices(), "cycle": s.cycle,
                           "labels": [[r, h, x, y] for (r, h), (x, y) in labels]})
    lines.append("matched ends: " + (" ".join(dec.endpoints) or "none"))
    return Outcome(0, lines, {
        "delta": tally.delta, "per_resident": tally.per_resident,
        "per_hospital": tally.per_hospital,
        "unused": {h: list(v) for h, v in tally.unused.items()},
        "structures": structures, "matched_ends": list(dec.endpoints),
    })


def cmd_reduce(args) -> Outcome:
    inst = _instance(args.instance)
    if args.spa:
        spa = pcsm_to_spa(inst)
        return Outcome(0, formats.serialize_spa(spa).splitlines(), formats.spa_to_dict(spa))
    layered = build_layered(inst, args.s)
    text = formats.serialize_instance(layered.instance)
    return Outcome(0, text.splitlines(), formats.instance_to_dict(layered.instance))


def cmd_gen(args) -> Outcome:
    try:
        cfg = GeneratorConfig(
            seed=args.seed, n_residents=args.residents, n_hospitals=args.hospitals,
            max_capacity=args.max_capacity, edge_density=args.density,
            max_tree_depth=args.depth, class_branching=args.branching,
            quota_tightness=args.tightness, partition=args.partition)
    except ValueError as exc:
        raise LCSMError(str(exc), "BAD_CONFIG") from None
    inst = generate(cfg)
    return Outcome(0, formats.serialize_instance(inst).splitlines(),
                   formats.instance_to_dict(inst))


def cmd_oracle(args) -> Outcome:
    inst = _instance(args.instance)
    op = args.op
    if op == "max-popular":
        size = brute_max_popular_size(inst, _guard(POPULAR_SIZE_GUARD), threads=args.threads)
        return Outcome(0, [str(size)], {"max_popular_size": size})
    table = FeasibleTable(inst, _guard(DEFAULT_GUARD), args.threads)
    if op == "enumerate":
        ms = list(table)
        return Outcome(0, [f"{len(ms)} feasible matchings"] + [_pairs(m, inst) for m in ms],
                       {"count": len(ms),
                        "matchings": [formats.matching_to_list(m, inst) for m in ms]})
    if op == "maxcard":
        size = brute_max_cardinality(inst, table=table)
        return Outcome(0, [str(size)], {"max_cardinality": size})
    if args.matching is None:
        raise LCSMError(f"oracle {op} needs a MATCHING file", "USAGE")
    m = _matching(args.matching, inst)
    check = brute_is_popular if op == "popular" else brute_unbeaten_among_maxcard
    ok, witness = check(inst, m, table=table)
    data: dict[str, Any] = {"holds": ok}
    lines = ["true"]
    if not ok:
        data["witness"] = formats.matching_to_list(witness, inst)
        lines = ["false", f"witness: {_pairs(witness, inst)}"]
    return Outcome(0 if ok else 1, lines, data)


# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON instead of text")

    p = argparse.ArgumentParser(prog="lcsm", description=(
        "Stable and popular matchings for hospitals/residents with laminar class quotas."))
    sub = p.add_subparsers(dest="verb", required=True)

    s = sub.add_parser("solve", parents=[common], help="compute a matching")
    s.add_argument("kind", choices=sorted(SOLVERS))
    s.add_argument("instance")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", parents=[common], help="check a property of a matching")
    v.add_argument("property", choices=["feasible", "stable", "popular", "charc"])
    v.add_argument("instance")
    v.add_argument("matching")
    v.add_argument("rival", nargs="?")
    v.add_argument("--threads", type=int, default=1)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("compare", parents=[common], help="votes of B over A")
    c.add_argument("instance")
    c.add_argument("a")
    c.add_argument("b")
    c.set_defaults(func=cmd_compare)

    r = sub.add_parser("reduce", parents=[common], help="emit the layered or SPA instance")
    mode = r.add_mutually_exclusive_group(required=True)
    mode.add_argument("--s", type=int, help="number of levels")
    mode.add_argument("--spa", action="store_true", help="student/project form")
    r.add_argument("instance")
    r.set_defaults(func=cmd_reduce)

    g = sub.add_parser("gen", parents=[common], help="random instance")
    d = GeneratorConfig()
    g.add_argument("--seed", type=int, default=d.seed)
    g.add_argument("--residents", type=int, default=d.n_residents)
    g.add_argument("--hospitals", type=int, default=d.n_hospitals)
    g.add_argument("--max-capacity", type=int, default=d.max_capacity)
    g.add_argument("--density", type=float, default=d.edge_density)
    g.add_argument("--depth", type=int, default=d.max_tree_depth)
    g.add_argument("--branching", type=int, default=d.class_branching)
    g.add_argument("--tightness", type=float, default=d.quota_tightness)
    g.add_argument("--partition", action="store_true")
    g.set_defaults(func=cmd_gen)

    o = sub.add_parser("oracle", parents=[common], help="exhaustive checks on small instances")
    o.add_argument("op", choices=["enumerate", "popular", "maxcard", "max-popular", "unbeaten"])
    o.add_argument("instance")
    o.add_argument("matching", nargs="?")
    o.add_argument("--threads", type=int, default=1)
    o.set_defaults(func=cmd_oracle)
    return p


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        out = args.func(args)
    except (LCSMError, OSError, ValueError) as exc:
        code = getattr(exc, "code", None)
        prefix = f"{code}: " if isinstance(code, str) else ""
        print(f"error: {prefix}{exc}", file=sys.stderr)
        return 2
    if args.json:
        print(json.dumps({"exit": out.code, **out.data}, indent=2))
    else:
        print("\n".join(out.lines))
    return out.code


if __name__ == "__main__":
    sys.exit(main())
