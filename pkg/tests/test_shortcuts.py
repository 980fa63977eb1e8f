from fractions import Fraction

import pytest

from lcmst.algorithms.oracle import exact_lcmst
from lcmst.algorithms.shortcuts import (
    BudgetProvider,
    budgeted_shortest_path,
    path_pieces,
    run_lp_variant,
    simple_hierarchy,
)
from lcmst.api.schemas import BudgetKind
from lcmst.harness.audit import asserted, audit_lp
from lcmst.harness.generators import gadget_fig1_analog

from conftest import grid_graph, weighted_graph


@pytest.fixture
def two_routes():
    # 0 -> 3 through 1 is short and heavy, through 2 long and light
    return weighted_graph([(0, 1, 1, 10), (1, 3, 0, 0), (0, 2, 5, 1), (2, 3, 0, 0)])


@pytest.mark.parametrize("budget, length, weight", [(5, 5, 1), (10, 1, 10), (100, 1, 10), (1, 5, 1)])
def test_budgeted_path_picks_shortest_affordable_route(two_routes, budget, length, weight):
    path = budgeted_shortest_path(two_routes, {0}, {3}, budget)
    assert (path.length, path.weight) == (length, weight)
    assert path.vertices[0] == 0 and path.vertices[-1] == 3


def test_budgeted_path_with_zero_budget(two_routes):
    assert budgeted_shortest_path(two_routes, {0}, {3}, 0) is None


def test_budgeted_path_from_target_is_empty(two_routes):
    path = budgeted_shortest_path(two_routes, {3}, {3}, 0)
    assert path.length == 0
    assert path.edges == frozenset()


def test_budgeted_path_reports_edges(two_routes):
    path = budgeted_shortest_path(two_routes, {0}, {3}, 5)
    assert path.edges == {(0, 2), (2, 3)}


def test_path_pieces_split_by_length():
    graph = weighted_graph([(i, i + 1, 1, 0) for i in range(6)])
    pieces = path_pieces(graph, [(i, i + 1) for i in range(6)], Fraction(2))
    assert pieces == (frozenset({0, 1, 2}), frozenset({3, 4, 5}), frozenset({6}))


def test_path_pieces_fall_back_for_non_paths():
    graph = weighted_graph([(0, 1, 1, 0), (0, 2, 1, 0), (0, 3, 1, 0)])
    pieces = path_pieces(graph, [(0, 1), (0, 2), (0, 3)], Fraction(4))
    assert frozenset().union(*pieces) == {0, 1, 2, 3}


def test_budget_provider_kinds():
    graph = weighted_graph([(0, 1, 1, 3)])
    assert BudgetProvider(BudgetKind.USER, value=7).budget(graph, 1) == 7
    assert BudgetProvider(BudgetKind.DIAMETER_LOWER_BOUND).budget(graph, 1) == 3
    with pytest.raises(ValueError):
        BudgetProvider(BudgetKind.EXACT_OPT).budget(graph, 1)


def test_budget_escalation_doubles():
    provider = BudgetProvider(BudgetKind.USER, value=0)
    assert provider.escalate() == 1
    assert provider.escalate() == 2
    assert provider.escalations == 2


def test_simple_hierarchy_contracts_separator_paths():
    graph = grid_graph(4, 4)
    hierarchy = simple_hierarchy(graph, 8, 0)
    for rid, kids in hierarchy.children.items():
        region = hierarchy.regions[rid]
        if not kids:
            assert not region.interior
        for k in kids:
            child = hierarchy.regions[k]
            assert child.interior <= region.interior
            assert region.contracted <= child.contracted
            assert not child.interior & child.contracted
    for stats in hierarchy.stats.values():
        assert stats.diameter_contracted <= stats.diameter_before


def test_lp_variant_on_gadget(settings):
    instance = gadget_fig1_analog(2)
    opt = exact_lcmst(instance, settings)
    provider = BudgetProvider(BudgetKind.EXACT_OPT, value=opt.weight)
    result = run_lp_variant(instance, provider, epsilon=1.0, opt_weight=opt.weight, settings=settings)
    assert result.report.variant == "lp-shortcuts"
    assert result.report.stats["spanning"]
    assert result.report.stats["budget"] == opt.weight
    for rid, shortcut in result.shortcuts.items():
        assert shortcut.weight <= len(result.pieces[rid]) * opt.weight
    violations = audit_lp(instance, result, BudgetKind.EXACT_OPT, opt=opt, settings=settings)
    assert not [v for v in asserted(violations) if v.check.startswith(("length.", "shortcuts.light"))]


def test_lp_variant_escalates_a_short_budget(settings):
    instance = gadget_fig1_analog(1)
    provider = BudgetProvider(BudgetKind.USER, value=0)
    result = run_lp_variant(instance, provider, settings=settings)
    assert result.report.stats["spanning"]
    assert provider.escalations >= 1
