"""
Invariant audits.

Each checker returns :class:`Violation` records. A record is ``asserted`` when the
inequality is guaranteed and its failure is a defect, ``measured`` when it is only
a recorded observation (constants hidden in asymptotic bounds, oracle-relative
claims that the construction does not force).
"""
import math
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional

import networkx as nx

from lcmst.algorithms.assembler import MainResult, length_bound
from lcmst.algorithms.divisions import (
    Division,
    Hierarchy,
    boundary_component_sets,
    boundary_components,
    boundary_length,
    flatten,
    restriction,
)
from lcmst.algorithms.metrics import lc_diameter, mixture_sp_tree
from lcmst.algorithms.oracle import ExactResult, is_feasible, solution_weight, solve_exact
from lcmst.algorithms.pieces import boundary_graph, induced_diameter
from lcmst.algorithms.reductions import ReductionBundle
from lcmst.algorithms.separators import Separator, SeparatorStats, is_balanced, separator_violations
from lcmst.algorithms.shortcuts import LpResult
from lcmst.api.schemas import AuditLevel, BudgetKind, Violation
from lcmst.core.config import Settings, get_settings
from lcmst.core.logger import get_logger
from lcmst.graph.instance import EdgeKey, Instance
from lcmst.graph.trees import edge_subgraph, length_distances, tree_from_edges

logger = get_logger(__name__)

ASSERTED = "asserted"
MEASURED = "measured"


class Audit:
    """Collects failed checks under one invariant family."""

    def __init__(self, family: str):
        self.family = family
        self.violations: List[Violation] = []

    def check(self, name: str, ok: bool, detail: str, mode: str = ASSERTED) -> bool:
        if not ok:
            self.violations.append(Violation(check=f"{self.family}.{name}", detail=detail, mode=mode))
        return ok


def asserted(violations: Iterable[Violation]) -> List[Violation]:
    return [v for v in violations if v.mode == ASSERTED]


def floor_log(base, value) -> int:
    """Largest k with base**k <= value, in exact arithmetic."""
    base, value = Fraction(base), Fraction(value)
    k, power = 0, base
    while power <= value:
        power *= base
        k += 1
    return k


def audit_separator(separator: Separator, graph: nx.Graph) -> List[Violation]:
    audit = Audit("separator")
    for name in separator_violations(separator, graph):
        audit.check(name, False, f"{separator.stats}")
    return audit.violations


def _separator_stats(audit: Audit, stats: SeparatorStats, where: str) -> None:
    audit.check(
        "balance",
        is_balanced(stats.weight_inside, stats.total_weight) and is_balanced(stats.weight_outside, stats.total_weight),
        f"{where}: sides {stats.weight_inside}/{stats.weight_outside} of {stats.total_weight}",
    )
    audit.check("length", stats.length <= 4 * stats.h, f"{where}: l(P)={stats.length} > 4*{stats.h}")
    audit.check("weight", stats.weight <= 4 * stats.diam_h, f"{where}: w(P)={stats.weight} > 4*{stats.diam_h}")


def audit_mixture_paths(graph: nx.Graph, h: int, root: int) -> List[Violation]:
    """Root paths of the mixture tree: length <= 2h and weight <= 2 D^(h)."""
    audit = Audit("mixture")
    diam = lc_diameter(graph, h)
    if diam == math.inf:
        return audit.violations
    tree = mixture_sp_tree(graph, h, root, diam_h=diam)
    lengths = tree.root_distances(graph, "length")
    weights = tree.root_distances(graph, "weight")
    for v in tree.vertices:
        audit.check("length", lengths[v] <= 2 * h, f"vertex {v}: l={lengths[v]} > 2h={2 * h}")
        audit.check("weight", weights[v] <= 2 * diam, f"vertex {v}: w={weights[v]} > 2D={2 * diam}")
    return audit.violations


def audit_division(
    graph: nx.Graph,
    division: Division,
    alpha,
    budget: int,
    vertex_weights: Mapping[int, int],
    settings: Settings,
    full: bool = False,
) -> List[Violation]:
    audit = Audit("division")
    parent, children = division.parent, division.children
    where = f"region {parent.region_id}"

    covered = frozenset().union(*(c.edges for c in children))
    audit.check("union", covered == parent.edges, f"{where}: children cover {len(covered)} of {len(parent.edges)} edges")
    all_boundary = parent.boundary.union(*(c.boundary for c in children))
    for e in parent.edges - all_boundary:
        owners = sum(e in c.edges for c in children)
        audit.check("complete", owners == 1, f"{where}: edge {e} lies in {owners} children")

    parent_weight = parent.interior_weight(vertex_weights)
    for child in children:
        cw = child.interior_weight(vertex_weights)
        audit.check(
            "alpha_divided",
            cw * Fraction(alpha) <= parent_weight,
            f"region {child.region_id}: interior weight {cw} > {parent_weight}/{alpha}",
        )
        length = boundary_length(graph, child)
        audit.check(
            "boundary_length",
            length <= settings.boundary_length_factor * budget,
            f"region {child.region_id}: l(L)={length} > {settings.boundary_length_factor}*{budget}",
        )
        comps = boundary_components(child)
        audit.check(
            "boundary_components",
            comps <= settings.boundary_component_cap,
            f"region {child.region_id}: {comps} components > {settings.boundary_component_cap}",
        )

    for stats in division.separators:
        _separator_stats(audit, stats, where)

    if full:
        added = all_boundary - parent.boundary
        added_weight = sum(graph.edges[e]["weight"] for e in added)
        diam = lc_diameter(flatten(graph, parent), budget)
        audit.check(
            "light_boundary",
            diam != math.inf and added_weight <= settings.light_boundary_factor * Fraction(alpha) * diam,
            f"{where}: new boundary weight {added_weight}, D={diam}",
            MEASURED,
        )
    return audit.violations


def audit_hierarchy(
    hierarchy: Hierarchy,
    vertex_weights: Optional[Mapping[int, int]] = None,
    settings: Optional[Settings] = None,
    full: bool = False,
) -> List[Violation]:
    settings = settings or get_settings()
    graph = hierarchy.graph
    weights = vertex_weights if vertex_weights is not None else {v: 1 for v in graph.nodes}
    violations: List[Violation] = []
    for rid in sorted(hierarchy.divisions):
        violations += audit_division(
            graph, hierarchy.divisions[rid], hierarchy.alpha, hierarchy.budget, weights, settings, full
        )

    audit = Audit("hierarchy")
    leaf_edges = frozenset().union(*(r.edges for r in hierarchy.leaves))
    all_edges = {tuple(sorted(e)) for e in graph.edges}
    audit.check("leaf_coverage", all_edges <= leaf_edges, f"{len(all_edges - leaf_edges)} edges in no leaf")
    for leaf in hierarchy.leaves:
        audit.check(
            "leaf_interior",
            leaf.interior_weight(weights) == 0,
            f"leaf {leaf.region_id} keeps interior weight {leaf.interior_weight(weights)}",
        )
    # the ceiling follows total vertex weight, floor(log_alpha W) + 1, not the vertex count
    total = sum(weights.values())
    ceiling = floor_log(hierarchy.alpha, max(total, 1)) + 1
    audit.check("depth_weight_log", hierarchy.depth <= ceiling, f"depth {hierarchy.depth} > {ceiling}")

    if full:
        diam_g = lc_diameter(graph, hierarchy.h)
        for rid in sorted(hierarchy.regions):
            region = hierarchy.regions[rid]
            diam = lc_diameter(flatten(graph, region), hierarchy.h)
            audit.check(
                "flattening",
                diam <= diam_g,
                f"region {rid}: D^(h)(H^0)={diam} > D^(h)(G)={diam_g}",
            )
    return violations + audit.violations


def audit_restriction(hierarchy: Hierarchy, opt: ExactResult, settings: Optional[Settings] = None) -> List[Violation]:
    """Oracle-relative hierarchy bounds for a fixed optimum."""
    settings = settings or get_settings()
    audit = Audit("restriction")
    if not opt.feasible:
        return audit.violations
    graph, h = hierarchy.graph, hierarchy.h
    restricted: Dict[int, int] = {}
    for rid, region in hierarchy.regions.items():
        _, restricted[rid] = restriction(graph, opt.edges, region)
        diam = lc_diameter(flatten(graph, region), 2 * h)
        audit.check(
            "diameter",
            diam <= restricted[rid],
            f"region {rid}: D^(2h)(H^0)={diam} > OPT|H={restricted[rid]}",
        )
    for rid, kids in hierarchy.children.items():
        if kids:
            total = sum(restricted[k] for k in kids)
            audit.check("children_sum", total <= opt.weight, f"region {rid}: {total} > OPT={opt.weight}")

    n = graph.number_of_nodes()
    boundary = sum(graph.edges[e]["weight"] for e in hierarchy.boundary_union())
    log_n = math.log(max(n, 2)) / math.log(float(hierarchy.alpha))
    ceiling = settings.hierarchy_boundary_factor * float(hierarchy.alpha) * log_n * opt.weight
    audit.check("boundary_weight", boundary <= ceiling, f"w(L)={boundary} > {ceiling:.1f}", MEASURED)
    return audit.violations


def audit_pieces(hierarchy: Hierarchy, beta, settings: Optional[Settings] = None) -> List[Violation]:
    """Pieces partition each boundary, stay inside one component and have diameter <= h/beta."""
    settings = settings or get_settings()
    audit = Audit("pieces")
    beta = Fraction(beta)
    graph, h = hierarchy.graph, hierarchy.h
    for rid, region in sorted(hierarchy.regions.items()):
        pieces = hierarchy.pieces.get(rid, ())
        if not region.boundary:
            continue
        where = f"region {rid}"
        members = [v for p in pieces for v in p]
        audit.check("disjoint", len(members) == len(set(members)), f"{where}: pieces overlap")
        audit.check(
            "cover",
            set(members) == set(region.boundary_vertices),
            f"{where}: pieces cover {len(set(members))} of {len(region.boundary_vertices)} boundary vertices",
        )
        sub = boundary_graph(graph, region.boundary)
        for comp in boundary_component_sets(region):
            inside = [p for p in pieces if p & comp]
            audit.check("component", all(p <= comp for p in inside), f"{where}: a piece spans two components")
            length = sum(sub.edges[e]["length"] for e in sub.subgraph(comp).edges)
            allowed = settings.piece_count_factor * beta * Fraction(max(length, h), h)
            audit.check("count", len(inside) <= allowed, f"{where}: {len(inside)} pieces > {float(allowed):.1f}")
        for piece in pieces:
            if piece <= set(sub.nodes):
                diam = induced_diameter(sub, piece)
                audit.check("diameter", diam * beta <= h, f"{where}: piece diameter {diam} > {h}/{beta}")
    return audit.violations


def audit_tree(
    instance: Instance,
    tree_edges: Iterable[EdgeKey],
    bound,
    required: Optional[FrozenSet[int]] = None,
) -> List[Violation]:
    """Every required vertex is reached, within ``bound`` of the root."""
    audit = Audit("length")
    graph = instance.to_graph()
    sub = edge_subgraph(graph, tree_edges)
    sub.add_node(instance.root)
    dist = length_distances(sub, instance.root)
    required = frozenset(range(instance.vertex_count)) if required is None else required
    missing = sorted(required - set(dist))
    audit.check("spanning", not missing, f"{len(missing)} required vertices unreached, first {missing[:1]}")
    worst = max((dist[v] for v in required if v in dist), default=0)
    audit.check("guarantee", worst <= bound, f"max root distance {worst} > {float(bound):.3f}")
    return audit.violations


def audit_main(
    instance: Instance,
    result: MainResult,
    level: AuditLevel = AuditLevel.BASIC,
    opt: Optional[ExactResult] = None,
    settings: Optional[Settings] = None,
) -> List[Violation]:
    settings = settings or get_settings()
    if level == AuditLevel.NONE:
        return []
    report, hierarchy = result.report, result.hierarchy
    beta = Fraction(report.params["beta"]).limit_denominator(8)
    terminals = None
    if report.variant == "main-steiner":
        terminals = frozenset(instance.terminals or ()) - {instance.root}
    violations = audit_tree(instance, result.tree.edges, length_bound(instance.h, hierarchy.depth, beta), terminals)

    audit = Audit("ratio")
    if opt is not None and opt.feasible and report.ratio is not None:
        alpha, delta = report.params["alpha"], report.params["delta"]
        ceiling = settings.main_ratio_factor * alpha * float(beta) ** delta * max(hierarchy.depth, 1)
        audit.check("main", report.ratio <= ceiling, f"ratio {report.ratio:.3f} > {ceiling:.3f}")
    violations += audit.violations

    if level == AuditLevel.FULL:
        weights = None
        if terminals is not None:
            weights = {v: int(v in terminals) for v in hierarchy.graph.nodes}
        violations += audit_hierarchy(hierarchy, weights, settings, full=True)
        violations += audit_pieces(hierarchy, beta, settings)
        violations += audit_mixture_paths(hierarchy.graph, instance.h, instance.root)
        if opt is not None and terminals is None:
            violations += audit_restriction(hierarchy, opt, settings)
    return violations


def audit_lp(
    instance: Instance,
    result: LpResult,
    kind: BudgetKind,
    level: AuditLevel = AuditLevel.BASIC,
    opt: Optional[ExactResult] = None,
    settings: Optional[Settings] = None,
) -> List[Violation]:
    settings = settings or get_settings()
    if level == AuditLevel.NONE:
        return []
    report, hierarchy = result.report, result.hierarchy
    graph, root, h = hierarchy.graph, instance.root, instance.h
    beta = Fraction(result.params.beta)
    violations = audit_tree(instance, result.tree.edges, math.inf)

    audit = Audit("shortcuts")
    budget = report.stats.get("budget") or 0
    for rid, shortcut in sorted(result.shortcuts.items()):
        allowed = len(result.pieces[rid]) * budget
        audit.check("light", shortcut.weight <= allowed, f"region {rid}: w(S)={shortcut.weight} > {allowed}")

    if opt is not None and opt.feasible:
        mode = ASSERTED if kind == BudgetKind.EXACT_OPT else MEASURED
        optimal = tree_from_edges(opt.edges, root).root_distances(graph, "length")
        ours = result.tree.root_distances(graph, "length")
        slack = Fraction(hierarchy.depth * h) / beta
        for v in sorted(optimal):
            audit.check(
                "length",
                ours.get(v, math.inf) <= optimal[v] + slack,
                f"vertex {v}: {ours.get(v)} > {optimal[v]} + {float(slack):.2f}",
                mode,
            )
        ceiling = settings.lp_ratio_factor * float(beta) * max(hierarchy.depth, 1)
        audit.check(
            "ratio", report.ratio is not None and report.ratio <= ceiling, f"ratio {report.ratio} > {ceiling}", mode
        )

    if level == AuditLevel.FULL:
        for rid, stats in sorted(hierarchy.stats.items()):
            if stats.separator is not None:
                audit.check(
                    "separator_weight",
                    stats.separator.weight <= 4 * stats.separator.diam_h,
                    f"region {rid}: w(P)={stats.separator.weight} > 4*{stats.separator.diam_h}",
                )
            audit.check(
                "contraction",
                stats.diameter_contracted <= stats.diameter_before,
                f"region {rid}: D grew from {stats.diameter_before} to {stats.diameter_contracted}",
            )
        if opt is not None and opt.feasible:
            optimal = tree_from_edges(opt.edges, root).root_distances(graph, "length")
            for rid, region in sorted(hierarchy.regions.items()):
                keys = region.boundary | result.shortcuts[rid].edges
                sub = edge_subgraph(graph, keys)
                sub.add_node(root)
                dist = length_distances(sub, root)
                for v in sorted({x for e in region.boundary for x in e}):
                    audit.check(
                        "shortcut_property",
                        dist.get(v, math.inf) * beta <= optimal[v] * beta + h,
                        f"region {rid} vertex {v}: {dist.get(v)} > {optimal[v]} + h/beta",
                        MEASURED,
                    )
    return violations + audit.violations


def audit_reduction(bundle: ReductionBundle, settings: Optional[Settings] = None) -> List[Violation]:
    """Exact optima agree and optimal solutions map to feasible solutions of equal weight."""
    settings = settings or get_settings()
    audit = Audit(f"reduction[{bundle.name}]")
    source = solve_exact(bundle.source, settings)
    target = solve_exact(bundle.target, settings)
    audit.check("opt_equal", source.weight == target.weight, f"OPT {source.weight} != {target.weight}")
    if target.feasible:
        back = bundle.backward(target.edges)
        ok = is_feasible(bundle.source, back)
        audit.check("backward_feasible", ok, f"{len(back)} mapped edges are infeasible")
        if ok:
            weight = solution_weight(bundle.source, back)
            audit.check("backward_weight", weight == target.weight, f"mapped weight {weight} != {target.weight}")
    if source.feasible:
        ahead = bundle.forward(source.edges)
        ok = is_feasible(bundle.target, ahead)
        audit.check("forward_feasible", ok, f"{len(ahead)} mapped edges are infeasible")
        if ok:
            weight = solution_weight(bundle.target, ahead)
            audit.check("forward_weight", weight == source.weight, f"mapped weight {weight} != {source.weight}")
    logger.debug("reduction_audited", reduction=bundle.name, violations=len(audit.violations))
    return audit.violations
