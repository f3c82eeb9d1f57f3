import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import all_matchings, example, example_matching, reference_blocking, small_instances
from lcsm_popular.errors import InfeasibleMatchingError, InstanceValidationError, UnknownResidentError
from lcsm_popular.model import (
    ROOT_ID,
    Matching,
    RawInstance,
    blocking_pairs,
    is_feasible_matching,
    is_feasible_set,
    is_stable,
    make_instance,
    validate_instance,
)


def codes_of(raw):
    with pytest.raises(InstanceValidationError) as info:
        validate_instance(raw)
    return info.value.codes


def one_hospital(classes, prefs=("a", "b", "c"), cap=2):
    return RawInstance(list(prefs), ["h"], {"h": cap},
                       {r: ["h"] for r in prefs}, {"h": list(prefs)}, {"h": classes})


def test_example_is_valid():
    inst = example()
    tree = inst.class_trees["h1"]
    assert [c.cid for c in tree] == [ROOT_ID, "c1", "c2"]
    assert tree.root.quota == 2
    assert tree["c1"].members == {"r1", "r2"} and tree["c1"].depth == 1
    assert len(inst.class_trees["h2"]) == 1
    assert inst.num_edges == 7
    assert inst.is_partition()


def test_root_synthesized_with_capacity():
    inst = make_instance(["r"], {"h": 3}, {"r": ["h"]}, {"h": ["r"]})
    assert inst.class_trees["h"].root.members == {"r"}
    assert inst.class_trees["h"].root.quota == 3


def test_explicit_root_class_accepted():
    inst = validate_instance(one_hospital([("all", ["a", "b", "c"], 2), ("x", ["a"], 1)]))
    assert inst.class_trees["h"].root.cid == "all"
    assert inst.class_trees["h"]["x"].parent == "all"


def test_non_laminar():
    assert "NON_LAMINAR" in codes_of(one_hospital([("x", ["a", "b"], 1), ("y", ["b", "c"], 1)]))


def test_non_mutual_edge():
    raw = RawInstance(["r"], ["h"], {"h": 1}, {"r": ["h"]}, {"h": []})
    assert codes_of(raw) == {"NON_MUTUAL_EDGE"}


def test_duplicate_class_sets_rejected():
    assert "DUPLICATE_CLASS" in codes_of(one_hospital([("x", ["a"], 1), ("y", ["a"], 0)]))
    assert "DUPLICATE_CLASS" in codes_of(one_hospital([("x", ["a"], 1), ("x", ["b"], 1)]))


def test_class_outside_preflist():
    assert "CLASS_OUTSIDE_PREFLIST" in codes_of(one_hospital([("x", ["a", "zz"], 1)]))


def test_duplicate_pref_entry():
    raw = RawInstance(["r"], ["h"], {"h": 1}, {"r": ["h", "h"]}, {"h": ["r"]})
    assert "DUPLICATE_PREF_ENTRY" in codes_of(raw)


def test_bad_quota_cases():
    assert "BAD_QUOTA" in codes_of(one_hospital([("all", ["a", "b", "c"], 1)]))
    assert "BAD_QUOTA" in codes_of(one_hospital([], cap=0))
    assert "BAD_QUOTA" in codes_of(one_hospital([("x", ["a"], -1)]))


def test_errors_are_exhaustive():
    raw = one_hospital([("x", ["a", "b"], 1), ("y", ["b", "c"], 1), ("z", [], 1)], cap=0)
    assert {"NON_LAMINAR", "BAD_QUOTA", "EMPTY_CLASS"} <= codes_of(raw)


def test_zero_quota_class_allowed():
    inst = validate_instance(one_hospital([("x", ["a"], 0)]))
    assert not is_feasible_set(inst, "h", {"a"})
    assert is_feasible_set(inst, "h", {"b", "c"})


def test_isolated_vertices_allowed():
    inst = make_instance(["r"], {"h": 1, "g": 2}, {"r": ["h"]}, {"h": ["r"]})
    assert inst.hospital_prefs["g"] == ()
    assert is_feasible_matching(inst, Matching())


def test_nesting_inferred_and_canonical_order():
    inst = validate_instance(one_hospital(
        [("inner", ["c"], 1), ("outer", ["b", "c"], 1), ("left", ["a"], 1)]))
    tree = inst.class_trees["h"]
    assert [c.cid for c in tree] == [ROOT_ID, "left", "outer", "inner"]
    assert tree["inner"].parent == "outer" and tree["inner"].depth == 2
    assert [tree.classes[i].cid for i in tree.chain("c")] == [ROOT_ID, "outer", "inner"]


def test_feasible_set_examples():
    inst = example()
    assert is_feasible_set(inst, "h1", {"r1", "r3"})
    assert not is_feasible_set(inst, "h1", {"r1", "r2"})
    assert is_feasible_set(inst, "h1", set())
    with pytest.raises(UnknownResidentError) as info:
        is_feasible_set(inst, "h2", {"r1"})
    assert info.value.code == "UNKNOWN_RESIDENT"


def test_feasible_matching_examples():
    inst = example()
    assert is_feasible_matching(inst, example_matching("popular"))
    assert not is_feasible_matching(inst, Matching({"r1": "h1", "r2": "h1"}))
    assert not is_feasible_matching(inst, Matching({"r1": "h2"}))
    assert is_feasible_matching(inst, Matching())


def test_blocking_pairs_example():
    inst = example()
    assert blocking_pairs(inst, example_matching("stable")) == []
    assert ("r3", "h1") in blocking_pairs(inst, example_matching("unstable"))
    assert is_stable(inst, example_matching("stable"))
    assert not is_stable(inst, example_matching("unstable"))


def test_blocking_pairs_trivial():
    inst = make_instance(["r"], {"h": 1}, {"r": ["h"]}, {"h": ["r"]})
    assert blocking_pairs(inst, Matching()) == [("r", "h")]


def test_blocking_pairs_requires_feasible():
    with pytest.raises(InfeasibleMatchingError) as info:
        blocking_pairs(example(), Matching({"r1": "h1", "r2": "h1"}))
    assert info.value.code == "INFEASIBLE_INPUT"


def test_blocking_swap_inside_saturated_class():
    # h holds a (class x full) and has room overall; b beats a inside x
    inst = validate_instance(one_hospital([("x", ["a", "b"], 1)], prefs=("b", "a", "c"), cap=3))
    assert blocking_pairs(inst, Matching({"a": "h"})) == [("b", "h"), ("c", "h")]


def test_matching_basics():
    m = Matching([("r1", "h1"), ("r2", "h1")])
    assert m.residents_of("h1") == {"r1", "r2"}
    assert m.hospital_of("r3") is None
    assert ("r1", "h1") in m and ("r1", "h2") not in m
    assert m == Matching({"r2": "h1", "r1": "h1"}) and hash(m) == hash(Matching(dict(m)))
    with pytest.raises(ValueError):
        Matching([("r1", "h1"), ("r1", "h2")])


@given(small_instances(max_residents=4), st.data())
def test_blocking_pairs_match_definition(inst, data):
    ms = list(all_matchings(inst))
    m = data.draw(st.sampled_from(ms))
    assert set(blocking_pairs(inst, m)) == reference_blocking(inst, m)


@given(small_instances(max_residents=4), st.data())
def test_feasibility_is_downward_closed(inst, data):
    m = data.draw(st.sampled_from(list(all_matchings(inst))))
    for r, _ in m:
        assert is_feasible_matching(inst, Matching({x: h for x, h in m if x != r}))


def test_docstring_examples():
    import doctest

    from lcsm_popular import model

    assert doctest.testmod(model).failed == 0
