import pytest

from lcmst.algorithms.oracle import (
    exact_dst,
    exact_gst,
    exact_lcmst,
    exact_lcst,
    is_feasible,
    solution_weight,
    solve_exact,
)
from lcmst.api.schemas import ProblemKind
from lcmst.core.config import Settings
from lcmst.core.exceptions import TooLargeError
from lcmst.graph.instance import make_instance
from lcmst.harness.generators import gadget_fig1_analog, small_instance


@pytest.fixture
def dst():
    return make_instance(ProblemKind.DST, 3, [(0, 1, 0, 2), (1, 2, 0, 1), (0, 2, 0, 5)], 0, 0, terminals=[2])


@pytest.fixture
def gst():
    return make_instance(
        ProblemKind.GST,
        4,
        [(0, 1, 0, 1), (1, 2, 0, 1), (0, 3, 0, 5), (2, 3, 0, 1)],
        0,
        1,
        groups=[[2], [3]],
    )


def test_triangle_optimum(triangle, settings):
    result = exact_lcmst(triangle, settings)
    assert result.weight == 2
    assert result.edges == {(0, 1), (0, 2)}
    assert result.method == "enumeration"


def test_gadget_optimum_pays_for_the_short_edge(gadget, settings):
    result = exact_lcmst(gadget, settings)
    assert result.weight == 10
    assert result.edges == {(0, 1), (0, 2), (2, 3)}


def test_infeasible_lcmst(settings):
    result = exact_lcmst(gadget_fig1_analog(1, infeasible=True), settings)
    assert not result.feasible
    assert result.weight is None


def test_single_vertex_is_trivial(settings):
    instance = make_instance(ProblemKind.LCMST, 1, [], 0, 0)
    assert exact_lcmst(instance, settings).weight == 0


def test_layered_fallback_agrees_with_enumeration(gadget):
    result = exact_lcmst(gadget, Settings(exact_edge_cap=2))
    assert result.method == "layered-dp"
    assert result.weight == 10


@pytest.mark.parametrize("seed", range(12))
def test_enumeration_matches_layered_dp_on_seeded_instances(seed, settings):
    instance = small_instance(ProblemKind.LCMST, 7, seed, length_range=(0, 3), weight_range=(0, 6))
    enumerated = exact_lcmst(instance, settings)
    layered = exact_lcmst(instance, Settings(exact_edge_cap=0))
    assert enumerated.weight == layered.weight
    if enumerated.feasible:
        assert enumerated.method == "enumeration"
        assert is_feasible(instance, enumerated.edges)
        assert solution_weight(instance, enumerated.edges) == enumerated.weight


def test_too_large_for_both_solvers(gadget):
    with pytest.raises(TooLargeError):
        exact_lcmst(gadget, Settings(exact_edge_cap=1, exact_terminal_cap=1))


def test_lcst_optimum(settings):
    instance = make_instance(
        ProblemKind.LCST, 3, [(0, 1, 1, 1), (0, 2, 1, 1), (1, 2, 2, 0)], 0, 1, terminals=[1]
    )
    result = exact_lcst(instance, settings)
    assert result.weight == 1
    assert result.edges == {(0, 1)}


def test_dst_optimum_follows_arcs(dst, settings):
    result = exact_dst(dst, settings)
    assert result.weight == 3
    assert result.edges == {(0, 1), (1, 2)}


def test_dst_reversed_arcs_are_unreachable(settings):
    instance = make_instance(ProblemKind.DST, 2, [(1, 0, 0, 1)], 0, 0, terminals=[1])
    assert not exact_dst(instance, settings).feasible


def test_gst_optimum(gst, settings):
    result = exact_gst(gst, settings)
    assert result.weight == 3
    assert result.edges == {(0, 1), (1, 2), (2, 3)}


def test_gst_group_cap(gst):
    with pytest.raises(TooLargeError):
        exact_gst(gst, Settings(exact_terminal_cap=1))


def test_solve_exact_dispatches_on_kind(triangle, dst, gst, settings):
    assert solve_exact(triangle, settings).weight == 2
    assert solve_exact(dst, settings).weight == 3
    assert solve_exact(gst, settings).weight == 3


def test_solution_weight_accepts_either_orientation(triangle):
    assert solution_weight(triangle, [(1, 0), (2, 0)]) == 2


@pytest.mark.parametrize(
    "edges, feasible",
    [
        ([(0, 1), (0, 2)], True),
        ([(0, 1), (1, 2)], False),
        ([(0, 1)], False),
        ([(0, 1), (0, 2), (0, 5)], False),
    ],
)
def test_lcmst_feasibility(triangle, edges, feasible):
    assert is_feasible(triangle, edges) is feasible


def test_dst_and_gst_feasibility(dst, gst):
    assert is_feasible(dst, [(0, 2)])
    assert not is_feasible(dst, [(1, 2)])
    assert is_feasible(gst, [(0, 3), (2, 3)])
    assert not is_feasible(gst, [(0, 1)])
