import pytest

from lcmst.algorithms.oracle import ExactResult
from lcmst.api.schemas import Algorithm, AuditLevel, BudgetKind, ProblemKind
from lcmst.api.solve import exact_report, make_provider, solve_instance
from lcmst.graph.instance import make_instance
from lcmst.harness.audit import asserted
from lcmst.harness.generators import gadget_fig1_analog


def test_all_algorithms_on_the_triangle(triangle, settings):
    outcome = solve_instance(triangle, Algorithm.ALL, settings=settings)
    assert [r.variant for r in outcome.reports] == ["exact", "main", "lp-shortcuts"]
    assert outcome.opt.weight == 2
    assert all(r.opt_weight == 2 for r in outcome.reports)
    assert outcome.reports[0].ratio == 1.0
    assert outcome.reports[0].max_root_distance == 1
    assert asserted(outcome.violations) == []


def test_other_kinds_only_get_the_exact_solver(settings):
    dst = make_instance(ProblemKind.DST, 3, [(0, 1, 0, 2), (1, 2, 0, 1)], 0, 0, terminals=[2])
    outcome = solve_instance(dst, Algorithm.ALL, settings=settings)
    assert [r.variant for r in outcome.reports] == ["exact"]
    assert outcome.reports[0].weight == 3


def test_no_audit_skips_the_oracle(gadget, settings):
    outcome = solve_instance(
        gadget, Algorithm.MAIN, audit=AuditLevel.NONE, budget=BudgetKind.DIAMETER_LOWER_BOUND, settings=settings
    )
    assert outcome.opt is None
    (report,) = outcome.reports
    assert report.opt_weight is None
    assert report.ratio is None
    assert report.violations == []


def test_exact_report_of_an_infeasible_instance(settings):
    instance = gadget_fig1_analog(1, infeasible=True)
    report = exact_report(instance, ExactResult(weight=None, edges=frozenset(), method="length-spt"))
    assert report.weight is None
    assert report.ratio is None
    assert report.stats["feasible"] is False


def test_exact_opt_provider_falls_back_without_an_optimum():
    assert make_provider(BudgetKind.EXACT_OPT, None, None).kind == BudgetKind.DIAMETER_LOWER_BOUND
    opt = ExactResult(weight=4, edges=frozenset())
    assert make_provider(BudgetKind.EXACT_OPT, None, opt).value == 4


def test_user_provider_needs_a_value():
    with pytest.raises(ValueError):
        make_provider(BudgetKind.USER, None, None)
    assert make_provider(BudgetKind.USER, 5, None).value == 5
