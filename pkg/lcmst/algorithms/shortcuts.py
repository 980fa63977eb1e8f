"""LP-competitive variant: simple contracted hierarchies, weight-budgeted shortcut paths."""
import heapq
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Hashable, Iterable, List, Optional, Tuple

import networkx as nx

from lcmst.algorithms.assembler import ResolvedParams, ratio, resolve_parameters
from lcmst.algorithms.divisions import check_feasible
from lcmst.algorithms.metrics import lc_diameter
from lcmst.algorithms.pieces import boundary_graph, partition_boundary
from lcmst.algorithms.separators import SeparatorStats, lc_separator
from lcmst.api.schemas import BudgetKind, ParameterPreset, SolveParams, SolveReport
from lcmst.core.config import Settings, get_settings
from lcmst.core.exceptions import InfiniteDiameterError, NoBalancedCycleError
from lcmst.core.logger import get_logger
from lcmst.graph.contraction import ContractedGraph, contract
from lcmst.graph.instance import EdgeKey, Instance, edge_key
from lcmst.graph.trees import SpanningTree, edge_subgraph, length_spt

logger = get_logger(__name__)


@dataclass(frozen=True)
class BudgetedPath:
    vertices: Tuple[Hashable, ...]
    edges: FrozenSet[EdgeKey]
    length: int
    weight: int


def budgeted_shortest_path(
    graph: nx.Graph,
    sources: Iterable[Hashable],
    targets: Iterable[Hashable],
    weight_budget: int,
) -> Optional[BudgetedPath]:
    """
    Minimum-length path from any source to any target among paths of weight at most
    ``weight_budget``.

    Labels (length, weight) are settled in length order; a label is dropped when an
    earlier label at the same vertex is no heavier.
    """
    targets = set(targets)
    labels: List[Tuple[Hashable, int, Optional[int]]] = []
    heap = []
    for s in sorted(set(sources), key=repr):
        labels.append((s, 0, None))
        heapq.heappush(heap, (0, 0, repr(s), len(labels) - 1))
    lightest: Dict[Hashable, int] = {}

    while heap:
        length, weight, _, label = heapq.heappop(heap)
        node = labels[label][0]
        if lightest.get(node, math.inf) <= weight:
            continue
        lightest[node] = weight
        if node in targets:
            path = []
            while label is not None:
                path.append(labels[label][0])
                label = labels[label][2]
            path.reverse()
            directed = graph.is_directed()
            edges = frozenset(edge_key(a, b, directed) for a, b in zip(path, path[1:]))
            return BudgetedPath(vertices=tuple(path), edges=edges, length=length, weight=weight)
        neighbors = graph.successors(node) if graph.is_directed() else graph.neighbors(node)
        for nxt in neighbors:
            data = graph[node][nxt]
            nw = weight + data["weight"]
            if nw > weight_budget or lightest.get(nxt, math.inf) <= nw:
                continue
            labels.append((nxt, nw, label))
            heapq.heappush(heap, (length + data["length"], nw, repr(nxt), len(labels) - 1))
    return None


@dataclass(frozen=True)
class SimpleRegion:
    """Region whose ancestors' separator paths are contracted into the root."""

    region_id: int
    interior: FrozenSet[int]
    contracted: FrozenSet[int]
    boundary: FrozenSet[EdgeKey] = frozenset()
    parent: Optional[int] = None
    depth: int = 0


@dataclass(frozen=True)
class SimpleDivisionStats:
    separator: Optional[SeparatorStats]
    diameter_before: float
    diameter_contracted: float
    fallback: bool = False


@dataclass(frozen=True)
class SimpleHierarchy:
    graph: nx.Graph
    root_vertex: int
    h: int
    regions: Dict[int, SimpleRegion]
    children: Dict[int, Tuple[int, ...]]
    stats: Dict[int, SimpleDivisionStats] = field(default_factory=dict)

    @property
    def depth(self) -> int:
        return max(r.depth for r in self.regions.values())

    def boundary_union(self) -> FrozenSet[EdgeKey]:
        return frozenset().union(*(r.boundary for r in self.regions.values()))


def _context(graph: nx.Graph, region: SimpleRegion, root: int) -> ContractedGraph:
    nodes = region.interior | region.contracted
    sub = nx.Graph()
    sub.add_nodes_from(nodes)
    for u, v, data in graph.subgraph(nodes).edges(data=True):
        sub.add_edge(u, v, length=data["length"], weight=data["weight"], orig=edge_key(u, v))
    return contract(sub, [region.contracted], representatives=[root])


def _separate_or_fallback(context: ContractedGraph, region: SimpleRegion, budget: int, root: int):
    graph = context.graph
    weights = {v: 1 for v in region.interior}
    if graph.number_of_nodes() >= 3:
        ceiling = max(budget, sum(d["length"] for _, _, d in graph.edges(data=True)))
        while True:
            try:
                sep = lc_separator(graph, weights, budget, root=root)
                inside = frozenset(sep.cycle.inside) & region.interior
                outside = frozenset(sep.cycle.outside) & region.interior
                return sep.path_edges, (inside, outside), sep.stats
            except InfiniteDiameterError:
                if budget >= ceiling:
                    raise
                budget = min(2 * budget, ceiling)
                logger.warning("simple_division_budget_escalated", region=region.region_id, budget=budget)
            except NoBalancedCycleError:
                logger.warning("simple_division_fallback", region=region.region_id)
                break
    return _fallback_path(context, region, root)


def _fallback_path(context: ContractedGraph, region: SimpleRegion, root: int):
    """Length shortest path from the root to the smallest interior vertex."""
    graph = context.graph
    target = min(region.interior)
    tree = length_spt(graph, root)
    path = tree.path_to_root(target)
    path_edges = frozenset(edge_key(a, b) for a, b in zip(path, path[1:]))
    rest = region.interior - set(path)
    return path_edges, (rest,), None


def simple_hierarchy(graph: nx.Graph, h: int, root: int = 0) -> SimpleHierarchy:
    """
    Recursive single-separator divisions with budget 2h. The separator path is
    contracted into the root before recursing; a region with no interior vertex is
    a leaf.
    """
    check_feasible(graph, root, h)
    budget = 2 * h
    top = SimpleRegion(region_id=0, interior=frozenset(graph.nodes) - {root}, contracted=frozenset({root}))
    regions = {0: top}
    children: Dict[int, Tuple[int, ...]] = {}
    stats: Dict[int, SimpleDivisionStats] = {}
    next_id = 1
    stack = [top]
    while stack:
        region = stack.pop()
        if not region.interior:
            children[region.region_id] = ()
            continue
        context = _context(graph, region, root)
        path_edges, sides, sep_stats = _separate_or_fallback(context, region, budget, root)
        boundary = frozenset(context.origins(path_edges))
        path_nodes = frozenset(v for e in path_edges for v in e)
        newly = frozenset(context.expand(path_nodes)) | frozenset(v for e in boundary for v in e)
        if not newly & region.interior:
            path_edges, sides, sep_stats = _fallback_path(context, region, root)
            boundary = frozenset(context.origins(path_edges))
        path_nodes = frozenset(v for e in path_edges for v in e)
        newly = frozenset(context.expand(path_nodes)) | frozenset(v for e in boundary for v in e)

        merged = contract(context.graph, [path_nodes | {root}], representatives=[root])
        stats[region.region_id] = SimpleDivisionStats(
            separator=sep_stats,
            diameter_before=lc_diameter(context.graph, h),
            diameter_contracted=lc_diameter(merged.graph, h) if merged.graph.number_of_nodes() > 1 else 0,
            fallback=sep_stats is None,
        )

        kids = []
        for side in sides:
            child = SimpleRegion(
                region_id=next_id,
                interior=frozenset(side) - newly,
                contracted=region.contracted | newly,
                boundary=boundary,
                parent=region.region_id,
                depth=region.depth + 1,
            )
            next_id += 1
            regions[child.region_id] = child
            kids.append(child.region_id)
            stack.append(child)
        children[region.region_id] = tuple(kids)

    hierarchy = SimpleHierarchy(graph=graph, root_vertex=root, h=h, regions=regions, children=children, stats=stats)
    logger.info("simple_hierarchy_built", regions=len(regions), depth=hierarchy.depth)
    return hierarchy


def path_pieces(graph: nx.Graph, boundary_edges: Iterable[EdgeKey], limit: Fraction) -> Tuple[FrozenSet[int], ...]:
    """Greedy subpaths of each boundary path, each of length at most ``limit``."""
    sub = boundary_graph(graph, boundary_edges)
    pieces: List[FrozenSet[int]] = []
    for comp in sorted(nx.connected_components(sub), key=min):
        component = sub.subgraph(comp)
        ends = sorted(v for v in component if component.degree(v) <= 1)
        if len(ends) != 2 or component.number_of_edges() != len(comp) - 1:
            total = sum(d["length"] for _, _, d in component.edges(data=True))
            budget = max(total, 1)
            pieces.extend(partition_boundary(component.copy(), Fraction(budget) / limit if limit else 1, budget).pieces)
            continue
        order = [ends[0]]
        while len(order) < len(comp):
            order.append(next(v for v in component.neighbors(order[-1]) if len(order) < 2 or v != order[-2]))
        current, acc = [order[0]], 0
        for a, b in zip(order, order[1:]):
            step = component[a][b]["length"]
            if acc + step > limit:
                pieces.append(frozenset(current))
                current, acc = [b], 0
            else:
                current.append(b)
                acc += step
        pieces.append(frozenset(current))
    return tuple(sorted(pieces, key=min))


@dataclass
class BudgetProvider:
    """Weight budget for shortcut paths (stands in for the LP value)."""

    kind: BudgetKind
    value: Optional[int] = None
    escalations: int = 0

    def budget(self, graph: nx.Graph, h: int) -> int:
        if self.value is None:
            if self.kind == BudgetKind.DIAMETER_LOWER_BOUND:
                diam = lc_diameter(graph, 2 * h)
                self.value = 0 if diam == math.inf else int(diam)
            else:
                raise ValueError(f"{self.kind.value} budget provider needs a value")
        return self.value

    def escalate(self) -> int:
        self.value = max(1, 2 * (self.value or 0))
        self.escalations += 1
        logger.warning("shortcut_budget_escalated", kind=self.kind.value, budget=self.value)
        return self.value


@dataclass(frozen=True)
class ShortcutSet:
    region_id: int
    paths: Tuple[BudgetedPath, ...]
    edges: FrozenSet[EdgeKey]
    weight: int


def region_shortcuts(
    graph: nx.Graph, region: SimpleRegion, pieces, root: int, provider: BudgetProvider, h: int
) -> ShortcutSet:
    paths = []
    for piece in pieces:
        while True:
            path = budgeted_shortest_path(graph, {root}, piece, provider.budget(graph, h))
            if path is not None:
                break
            provider.escalate()
        paths.append(path)
    edges = frozenset().union(*(p.edges for p in paths)) if paths else frozenset()
    weight = sum(graph.edges[e]["weight"] for e in edges)
    return ShortcutSet(region_id=region.region_id, paths=tuple(paths), edges=edges, weight=weight)


@dataclass(frozen=True)
class LpResult:
    tree: SpanningTree
    report: SolveReport
    hierarchy: SimpleHierarchy
    pieces: Dict[int, Tuple[FrozenSet[int], ...]]
    shortcuts: Dict[int, ShortcutSet]
    params: ResolvedParams


def run_lp_variant(
    instance: Instance,
    provider: BudgetProvider,
    epsilon: Optional[float] = None,
    params: Optional[SolveParams] = None,
    opt_weight: Optional[int] = None,
    settings: Optional[Settings] = None,
) -> LpResult:
    """Simple hierarchy, greedy path pieces of length h/beta, budgeted shortcuts, length SPT of the union."""
    started = time.perf_counter()
    settings = settings or get_settings()
    params = params or SolveParams(preset=ParameterPreset.LP, epsilon=epsilon)
    resolved = resolve_parameters(instance.vertex_count, params, settings)
    graph = instance.to_graph()
    root, h = instance.root, instance.h

    hierarchy = simple_hierarchy(graph, h, root)
    limit = Fraction(h) / resolved.beta
    pieces = {rid: path_pieces(graph, region.boundary, limit) for rid, region in hierarchy.regions.items()}
    shortcuts = {
        rid: region_shortcuts(graph, hierarchy.regions[rid], pieces[rid], root, provider, h)
        for rid in sorted(hierarchy.regions)
    }

    shortcut_edges = frozenset().union(*(s.edges for s in shortcuts.values()))
    bought = hierarchy.boundary_union() | shortcut_edges
    sub = edge_subgraph(graph, bought)
    sub.add_node(root)
    tree = length_spt(sub, root)

    dist = tree.root_distances(graph)
    weight = sum(graph.edges[e]["weight"] for e in tree.edges)
    max_dist = max(dist.values(), default=0)
    report = SolveReport(
        instance_id=instance.instance_id,
        variant="lp-shortcuts",
        params=resolved.as_dict(),
        weight=weight,
        opt_weight=opt_weight,
        ratio=ratio(weight, opt_weight),
        max_root_distance=max_dist,
        h=h,
        slack=max_dist / h,
        depth=hierarchy.depth,
        wall_time_ms=(time.perf_counter() - started) * 1000,
        edges=sorted(tree.edges),
        stats={
            "budget_kind": provider.kind.value,
            "budget": provider.value,
            "budget_escalations": provider.escalations,
            "regions": len(hierarchy.regions),
            "pieces": sum(len(p) for p in pieces.values()),
            "boundary_weight": sum(graph.edges[e]["weight"] for e in hierarchy.boundary_union()),
            "shortcut_weight": sum(graph.edges[e]["weight"] for e in shortcut_edges),
            "spanning": len(tree.parent) == graph.number_of_nodes(),
        },
    )
    logger.info("lp_variant_solved", instance_id=report.instance_id, weight=weight, slack=report.slack, depth=report.depth)
    return LpResult(
        tree=tree, report=report, hierarchy=hierarchy, pieces=pieces, shortcuts=shortcuts, params=resolved
    )
