import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import structures
from oracles import brute_homs
from pinchlab.catalog import C3, GRAPH, K2, K3, LOOP, PT, UNARY, empty, p_point, q_point, symmetric_cycle
from pinchlab.constructions import disjoint_union
from pinchlab.solver import (
    BudgetExceeded,
    EnumerationCapExceeded,
    SearchConfig,
    SearchStats,
    components,
    csp_member,
    enumerate_homs,
    find_hom,
    find_surjective_hom,
    is_hom_independent,
)
from pinchlab.structures import RelStructure


def test_find_hom_examples():
    assert find_hom(K2, K2).map == (0, 1)
    assert find_hom(K3, K2) is None
    h = find_hom(empty(), K2)
    assert h is not None and h.map == ()


def test_csp_member_examples():
    assert csp_member(C3, LOOP)
    assert not csp_member(symmetric_cycle(5), K2)
    assert csp_member(symmetric_cycle(4), K2)


def test_enumerate_examples():
    assert [h.map for h in enumerate_homs(K2, K2)] == [(0, 1), (1, 0)]
    assert len(enumerate_homs(PT, K3)) == 3
    assert enumerate_homs(LOOP, K2) == []


def test_surjective_examples():
    assert find_surjective_hom(K2, PT) is None
    assert find_surjective_hom(K2, K2).map == (0, 1)
    two_points = RelStructure(GRAPH, 2)
    assert find_surjective_hom(two_points, PT).map == (0, 0)


def test_independence_examples():
    assert is_hom_independent([p_point(), q_point()])
    assert not is_hom_independent([K2, K3])
    assert is_hom_independent([K2])


def test_budget_is_not_none():
    with pytest.raises(BudgetExceeded):
        find_hom(K3, K2, SearchConfig(node_budget=1))
    with pytest.raises(EnumerationCapExceeded):
        enumerate_homs(PT, K3, SearchConfig(enumeration_cap=2))


def test_signature_mismatch():
    with pytest.raises(ValueError):
        find_hom(K2, p_point())


def test_components_order():
    u, _ = disjoint_union([K2, PT, C3])
    assert components(u) == [[0, 1], [2], [3, 4, 5]]


def test_parallel_matches_serial():
    u, _ = disjoint_union([symmetric_cycle(4), C3, K2])
    serial = find_hom(u, K3)
    par = find_hom(u, K3, SearchConfig(parallel=True, workers=2))
    assert serial == par


def test_stats_count_nodes():
    st_ = SearchStats()
    find_hom(symmetric_cycle(6), K2, stats=st_)
    assert st_.nodes > 0


@given(structures(max_size=4), structures(max_size=3))
def test_agrees_with_exhaustive_maps(a, b):
    expected = brute_homs(a, b)
    got = find_hom(a, b)
    if expected:
        assert got is not None and got.map == min(expected)
    else:
        assert got is None
    assert [h.map for h in enumerate_homs(a, b)] == expected


@given(structures(UNARY, max_size=4), structures(UNARY, max_size=3))
def test_agrees_on_unary(a, b):
    expected = brute_homs(a, b)
    assert (find_hom(a, b) is not None) == bool(expected)


@given(structures(max_size=4), structures(max_size=3))
def test_surjective_agrees(a, b):
    expected = [f for f in brute_homs(a, b) if len(set(f)) == b.size]
    got = find_surjective_hom(a, b)
    assert (got.map if got else None) == (min(expected) if expected else None)


@given(structures(max_size=3), structures(max_size=3), structures(max_size=3))
def test_csp_composition(b, a, a2):
    if csp_member(b, a) and csp_member(a, a2):
        assert csp_member(b, a2)


@given(structures(max_size=5))
def test_parallel_flag_never_changes_answer(s):
    assert find_hom(s, K2) == find_hom(s, K2, SearchConfig(parallel=True, workers=2)) or s.size == 0


@given(st.integers(3, 9))
def test_cycles_two_colourable_iff_even(n):
    assert csp_member(symmetric_cycle(n), K2) == (n % 2 == 0)
