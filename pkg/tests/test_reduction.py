import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import all_matchings, example, small_instances
from lcsm_popular.errors import BadLevelCountError, InvariantViolationError, NotPartitionError
from lcsm_popular.model import Matching, is_feasible_matching, make_instance
from lcsm_popular.popularity import AlternatingStructure, Edge, decompose, swap, vote
from lcsm_popular.reduction import (
    build_layered,
    check_invariants,
    copy_name,
    level_transitions,
    lift_resident,
    lifted_labels,
    map_down,
    map_up,
    pcsm_to_spa,
)
from lcsm_popular.stable import solve_stable


def test_two_level_example():
    layered = build_layered(example(), 2)
    g = layered.instance
    assert len(g.residents) == 8 and len(g.hospitals) == 7
    assert g.resident_prefs["r2#0"] == ("h2", "h1", "h3", "d#r2#0")
    assert g.resident_prefs["r2#1"] == ("d#r2#0", "h2", "h1", "h3")
    assert g.hospital_prefs["h1"] == ("r2#1", "r3#1", "r4#1", "r1#1",
                                      "r2#0", "r3#0", "r4#0", "r1#0")
    assert g.hospital_prefs["d#r2#0"] == ("r2#0", "r2#1")
    assert g.capacity["d#r2#0"] == 1
    c1 = g.class_trees["h1"]["c1"]
    assert c1.members == {"r1#0", "r1#1", "r2#0", "r2#1"} and c1.quota == 1


def test_middle_levels():
    g = build_layered(example(), 3).instance
    assert g.resident_prefs["r1#1"] == ("d#r1#0", "h1", "d#r1#1")
    assert g.resident_prefs["r1#2"] == ("d#r1#1", "h1")
    assert g.hospital_prefs["h2"] == ("r3#2", "r2#2", "r3#1", "r2#1", "r3#0", "r2#0")


def test_no_edge_instance_has_only_dummy_edges():
    inst = make_instance(["a", "b"], {"h": 1}, {}, {})
    g = build_layered(inst, 2).instance
    assert all(h.startswith("d#") for r in g.residents for h in g.resident_prefs[r])


def test_bad_s():
    with pytest.raises(BadLevelCountError) as info:
        build_layered(example(), 1)
    assert info.value.code == "BAD_S"
    with pytest.raises(BadLevelCountError):
        build_layered(example(), 5)
    build_layered(example(), 4)


def test_hash_in_identifier_rejected():
    inst = make_instance(["r#1"], {"h": 1}, {"r#1": ["h"]}, {"h": ["r#1"]})
    with pytest.raises(ValueError):
        build_layered(inst, 2)


def test_example_pipeline_and_invariants():
    layered = build_layered(example(), 2)
    ms = solve_stable(layered.instance)
    assert check_invariants(layered, ms) == []
    m = map_down(layered, ms)
    assert is_feasible_matching(example(), m) and len(m) == 4


def test_invariant_reports():
    layered = build_layered(example(), 2)
    ms = solve_stable(layered.instance)
    pairs = dict(ms)
    holder = next(c for c, h in pairs.items() if h == "d#r2#0")
    del pairs[holder]
    assert any(p.startswith("dummy") for p in check_invariants(layered, Matching(pairs)))

    inst = make_instance(["r"], {"h": 1, "g": 1}, {"r": ["h", "g"]}, {"h": ["r"], "g": ["r"]})
    two = build_layered(inst, 2)
    bad = Matching({"r#0": "h", "r#1": "g"})
    assert any(p.startswith("single-real") for p in check_invariants(two, bad))
    with pytest.raises(InvariantViolationError):
        map_down(two, bad)


def test_map_down_edge_cases():
    inst = make_instance(["r"], {"h": 1}, {"r": ["h"]}, {"h": ["r"]})
    layered = build_layered(inst, 2)
    assert map_down(layered, Matching({"r#0": "d#r#0"})) == Matching()
    assert map_down(layered, solve_stable(layered.instance)) == Matching({"r": "h"})


def test_map_up_fallback_and_empty():
    inst = example()
    layered = build_layered(inst, 2)
    ms = solve_stable(layered.instance)
    assert map_up(layered, ms, AlternatingStructure(())).edges == ()
    lone = make_instance(["r", "x"], {"h": 1}, {"r": ["h"], "x": ["h"]}, {"h": ["x", "r"]})
    ll = build_layered(lone, 2)
    ls = solve_stable(ll.instance)
    assert lift_resident(ll, ls, "r") == copy_name("r", 1)
    lifted = map_up(ll, ls, AlternatingStructure((Edge("r", "h", True),)))
    assert lifted.edges == (Edge("r#1", "h", True),)


def test_example_lifted_path():
    inst = example()
    layered = build_layered(inst, 2)
    ms = solve_stable(layered.instance)
    m = map_down(layered, ms)
    rival = Matching({"r1": "h1", "r2": "h2", "r3": "h1"})
    (path,) = decompose(inst, m, rival).structures
    lifted = map_up(layered, ms, path)
    for e, f in zip(path.edges, lifted.edges):
        assert f.hospital == e.hospital and layered.origin(f.resident)[0] == e.resident
        if not e.rival:
            assert (f.resident, f.hospital) in ms
    assert (1, 1) not in lifted_labels(layered, ms, lifted).values()


def test_spa_example():
    spa = pcsm_to_spa(example())
    owned = {p.pid: (p.lecturer, p.capacity) for p in spa.projects}
    assert owned == {"h1.c1": ("h1", 1), "h1.c2": ("h1", 1), "h2.*": ("h2", 1), "h3.*": ("h3", 1)}
    assert spa.lecturers == {"h1": 2, "h2": 1, "h3": 1}
    assert spa.student_prefs["r3"] == ("h1.c2", "h2.*")
    assert spa.lecturer_prefs["h1"] == ("r2", "r3", "r4", "r1")


def test_spa_root_only_and_not_partition():
    inst = make_instance(["a", "b"], {"h": 2}, {"a": ["h"], "b": ["h"]}, {"h": ["a", "b"]})
    (p,) = pcsm_to_spa(inst).projects
    assert p.capacity == 2
    nested = make_instance(["a", "b"], {"h": 2}, {"a": ["h"], "b": ["h"]}, {"h": ["a", "b"]},
                           {"h": [("x", ["a"], 1)]})
    with pytest.raises(NotPartitionError):
        pcsm_to_spa(nested)


@given(small_instances(max_residents=6, partition=True))
def test_spa_preserves_ranks(inst):
    spa = pcsm_to_spa(inst)
    assert len(spa.students) == len(inst.residents)
    owner = {p.pid: p.lecturer for p in spa.projects}
    for r in inst.residents:
        assert [owner[p] for p in spa.student_prefs[r]] == list(inst.resident_prefs[r])


def levels(inst):
    return sorted({2, max(len(inst.residents), 2)})


@given(small_instances(max_residents=5), st.data())
def test_layered_properties(inst, data):
    rivals = list(all_matchings(inst))
    for s in levels(inst):
        layered = build_layered(inst, s)
        g = layered.instance
        assert len(g.residents) == s * len(inst.residents)
        assert len(g.hospitals) == len(inst.hospitals) + (s - 1) * len(inst.residents)
        for h in inst.hospitals:
            for c in inst.class_trees[h].classes[1:]:
                lifted = g.class_trees[h][c.cid]
                assert len(lifted.members) == s * len(c.members) and lifted.quota == c.quota

        ms = solve_stable(g)
        assert check_invariants(layered, ms) == []
        m = map_down(layered, ms)
        assert is_feasible_matching(inst, m)

        rival = data.draw(st.sampled_from(rivals))
        dec = decompose(inst, m, rival)
        for rho in dec.structures:
            lifted = map_up(layered, ms, rho)
            assert not any(layered.is_dummy(e.hospital) for e in lifted.edges)
            assert is_feasible_matching(g, swap(ms, lifted))
            assert (1, 1) not in lifted_labels(layered, ms, lifted).values()
            for h, top, held in level_transitions(layered, lifted):
                ra, ja = layered.origin(top)
                rb, jb = layered.origin(held)
                for lower in range(ja):
                    c = copy_name(ra, lower)
                    assert (vote(g, c, h, ms.hospital_of(c)), vote(g, h, c, held)) != (1, 1)
                if s == len(inst.residents) and s > 2:
                    if ja > jb:
                        assert ja == jb + 1
                        assert dec.labels[(ra, h)] == (-1, -1)
                    if dec.labels[(ra, h)] == (1, 1):
                        assert ja < jb
