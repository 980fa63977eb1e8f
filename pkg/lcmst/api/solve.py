"""Solve an instance with the selected algorithms and attach audit results to each report."""
import time
from dataclasses import dataclass, field
from typing import List, Optional

from lcmst.algorithms.assembler import MainResult, ratio, run_main
from lcmst.algorithms.oracle import ExactResult, solve_exact
from lcmst.algorithms.shortcuts import BudgetProvider, LpResult, run_lp_variant
from lcmst.api.schemas import (
    Algorithm,
    AuditLevel,
    BudgetKind,
    ParameterPreset,
    ProblemKind,
    SolveParams,
    SolveReport,
)
from lcmst.core.config import Settings, get_settings
from lcmst.core.exceptions import TooLargeError
from lcmst.core.logger import get_logger
from lcmst.graph.instance import Instance
from lcmst.graph.trees import tree_from_edges
from lcmst.harness.audit import audit_lp, audit_main

logger = get_logger(__name__)


@dataclass
class SolveOutcome:
    """Reports of one instance plus the raw results, for dumps and later audits."""

    instance: Instance
    reports: List[SolveReport] = field(default_factory=list)
    opt: Optional[ExactResult] = None
    main: Optional[MainResult] = None
    lp: Optional[LpResult] = None

    @property
    def violations(self):
        return [v for r in self.reports for v in r.violations]


def try_exact(instance: Instance, settings: Settings) -> Optional[ExactResult]:
    try:
        return solve_exact(instance, settings)
    except TooLargeError as e:
        logger.warning("exact_skipped", instance_id=instance.instance_id, reason=str(e))
        return None


def exact_report(instance: Instance, result: ExactResult, wall_time_ms: float = 0.0) -> SolveReport:
    report = SolveReport(
        instance_id=instance.instance_id,
        variant="exact",
        weight=result.weight,
        opt_weight=result.weight,
        ratio=1.0 if result.feasible else None,
        h=instance.h,
        wall_time_ms=wall_time_ms,
        edges=sorted(result.edges),
        stats={"method": result.method, "candidates": result.candidates, "feasible": result.feasible},
    )
    if result.feasible and instance.kind == ProblemKind.LCMST and instance.h:
        dist = tree_from_edges(result.edges, instance.root).root_distances(instance.to_graph())
        worst = max(dist.values(), default=0)
        report = report.model_copy(update={"max_root_distance": worst, "slack": worst / instance.h})
    return report


def make_provider(kind: BudgetKind, value: Optional[int], opt: Optional[ExactResult]) -> BudgetProvider:
    if kind == BudgetKind.EXACT_OPT:
        if opt is not None and opt.feasible:
            return BudgetProvider(kind=kind, value=opt.weight)
        logger.warning("budget_provider_fallback", requested=kind.value, used=BudgetKind.DIAMETER_LOWER_BOUND.value)
        return BudgetProvider(kind=BudgetKind.DIAMETER_LOWER_BOUND)
    if kind == BudgetKind.USER:
        if value is None:
            raise ValueError("the user budget provider needs a budget value")
        return BudgetProvider(kind=kind, value=value)
    return BudgetProvider(kind=kind)


def solve_instance(
    instance: Instance,
    algorithm: Algorithm = Algorithm.ALL,
    params: Optional[SolveParams] = None,
    audit: AuditLevel = AuditLevel.BASIC,
    budget: BudgetKind = BudgetKind.EXACT_OPT,
    budget_value: Optional[int] = None,
    settings: Optional[Settings] = None,
) -> SolveOutcome:
    settings = settings or get_settings()
    params = params or SolveParams()
    algorithm = Algorithm(algorithm)
    outcome = SolveOutcome(instance=instance)
    wants = {Algorithm.MAIN, Algorithm.LP_SHORTCUTS, Algorithm.EXACT} if algorithm == Algorithm.ALL else {algorithm}
    if instance.kind not in (ProblemKind.LCMST, ProblemKind.LCST):
        wants = {Algorithm.EXACT}

    needs_opt = Algorithm.EXACT in wants or audit != AuditLevel.NONE or budget == BudgetKind.EXACT_OPT
    if needs_opt:
        started = time.perf_counter()
        outcome.opt = try_exact(instance, settings)
        if outcome.opt is not None and Algorithm.EXACT in wants:
            outcome.reports.append(exact_report(instance, outcome.opt, (time.perf_counter() - started) * 1000))
    opt_weight = outcome.opt.weight if outcome.opt is not None else None

    if Algorithm.MAIN in wants:
        outcome.main = run_main(instance, params, opt_weight, settings)
        violations = audit_main(instance, outcome.main, audit, outcome.opt, settings)
        outcome.reports.append(outcome.main.report.model_copy(update={"violations": violations}))

    if Algorithm.LP_SHORTCUTS in wants and instance.kind == ProblemKind.LCMST:
        provider = make_provider(budget, budget_value, outcome.opt)
        lp_params = params
        if params.preset == ParameterPreset.EXPLICIT:
            lp_params = params.model_copy(update={"preset": ParameterPreset.LP})
        outcome.lp = run_lp_variant(instance, provider, params=lp_params, opt_weight=opt_weight, settings=settings)
        violations = audit_lp(instance, outcome.lp, provider.kind, audit, outcome.opt, settings)
        report = outcome.lp.report.model_copy(
            update={"violations": violations, "ratio": ratio(outcome.lp.report.weight, opt_weight)}
        )
        outcome.reports.append(report)

    for report in outcome.reports:
        if report.violations:
            logger.warning(
                "invariant_violations",
                instance_id=report.instance_id,
                variant=report.variant,
                count=len(report.violations),
                checks=sorted({v.check for v in report.violations}),
            )
    return outcome
