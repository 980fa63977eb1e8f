"""Regions, boundary flattening, length-constrained alpha-divisions and division hierarchies."""
import itertools
import math
from collections import defaultdict, deque
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Tuple

import networkx as nx

from lcmst.algorithms.separators import SeparatorStats, lc_separator
from lcmst.api.schemas import HierarchyDump, RegionDump
from lcmst.core.exceptions import InfeasibleInstanceError, InfiniteDiameterError, NoBalancedCycleError
from lcmst.core.logger import get_logger
from lcmst.graph.contraction import contract
from lcmst.graph.instance import EdgeKey, edge_key
from lcmst.graph.trees import length_distances, length_spt

logger = get_logger(__name__)


@dataclass(frozen=True)
class Region:
    """Edge-induced subgraph H of G with boundary edge set L_H (flattened in H's context)."""

    region_id: int
    edges: FrozenSet[EdgeKey]
    boundary: FrozenSet[EdgeKey] = frozenset()
    parent: Optional[int] = None
    depth: int = 0

    @property
    def vertices(self) -> FrozenSet[int]:
        return frozenset(v for e in self.edges for v in e)

    @property
    def boundary_vertices(self) -> FrozenSet[int]:
        return frozenset(v for e in self.boundary for v in e)

    @property
    def interior_vertices(self) -> FrozenSet[int]:
        return self.vertices - self.boundary_vertices

    def interior_weight(self, vertex_weights: Mapping[int, int]) -> int:
        return sum(vertex_weights.get(v, 0) for v in self.interior_vertices)


@dataclass(frozen=True)
class Division:
    parent: Region
    children: Tuple[Region, ...]
    separators: Tuple[SeparatorStats, ...] = ()
    budget_escalations: int = 0


@dataclass(frozen=True)
class Hierarchy:
    """Rooted tree of regions; ``pieces`` is filled in by the piece partitioner."""

    graph: nx.Graph
    root_vertex: int
    alpha: Fraction
    h: int
    budget: int
    regions: Mapping[int, Region]
    children: Mapping[int, Tuple[int, ...]]
    divisions: Mapping[int, Division]
    pieces: Mapping[int, Tuple[FrozenSet[int], ...]] = field(default_factory=dict)

    @property
    def root(self) -> Region:
        return self.regions[0]

    @property
    def depth(self) -> int:
        return max(r.depth for r in self.regions.values())

    @property
    def leaves(self) -> List[Region]:
        return [self.regions[i] for i in sorted(self.regions) if not self.children[i]]

    def bottom_up(self) -> List[Region]:
        return sorted(self.regions.values(), key=lambda r: (-r.depth, r.region_id))

    def boundary_union(self) -> FrozenSet[EdgeKey]:
        return frozenset().union(*(r.boundary for r in self.regions.values()))

    def with_pieces(self, pieces: Mapping[int, Tuple[FrozenSet[int], ...]]) -> "Hierarchy":
        return replace(self, pieces=dict(pieces))

    def dump(self) -> HierarchyDump:
        regions = []
        for rid in sorted(self.regions):
            region = self.regions[rid]
            regions.append(
                RegionDump(
                    region_id=rid,
                    parent=region.parent,
                    depth=region.depth,
                    edges=sorted(region.edges),
                    boundary=sorted(region.boundary),
                    boundary_length=boundary_length(self.graph, region),
                    boundary_weight=boundary_weight(self.graph, region),
                    boundary_components=boundary_components(region),
                    pieces=[sorted(p) for p in self.pieces.get(rid, ())],
                    children=list(self.children[rid]),
                )
            )
        return HierarchyDump(alpha=float(self.alpha), h=self.h, depth=self.depth, regions=regions)

    def to_dot(self) -> str:
        lines = ["digraph hierarchy {"]
        for rid in sorted(self.regions):
            region = self.regions[rid]
            label = f"{rid}: |E|={len(region.edges)} |L|={len(region.boundary)}"
            lines.append(f'  r{rid} [label="{label}"];')
            lines.extend(f"  r{rid} -> r{child};" for child in self.children[rid])
        lines.append("}")
        return "\n".join(lines) + "\n"


def boundary_length(graph: nx.Graph, region: Region) -> int:
    return sum(graph.edges[e]["length"] for e in region.boundary)


def boundary_weight(graph: nx.Graph, region: Region) -> int:
    return sum(graph.edges[e]["weight"] for e in region.boundary)


def boundary_components(region: Region) -> int:
    if not region.boundary:
        return 0
    return nx.number_connected_components(nx.Graph(list(region.boundary)))


def boundary_component_sets(region: Region) -> List[FrozenSet[int]]:
    if not region.boundary:
        return []
    comps = nx.connected_components(nx.Graph(list(region.boundary)))
    return sorted((frozenset(c) for c in comps), key=min)


def flatten(graph: nx.Graph, region: Region) -> nx.Graph:
    """Region graph H^0: boundary edges get length and weight 0; ``orig`` holds the edge key."""
    flat = nx.Graph()
    for e in sorted(region.edges):
        data = graph.edges[e]
        zeroed = e in region.boundary
        flat.add_edge(
            *e,
            length=0 if zeroed else data["length"],
            weight=0 if zeroed else data["weight"],
            orig=e,
        )
    return flat


def division_levels(alpha) -> int:
    """3 * ceil(log_{3/2} alpha), at least one round."""
    alpha = Fraction(alpha)
    rounds, power = 0, Fraction(1)
    while power < alpha:
        power *= Fraction(3, 2)
        rounds += 1
    return 3 * max(1, rounds)


def _regime_weights(graph: nx.Graph, region: Region, regime: int, vertex_weights: Mapping[int, int]) -> Dict[int, int]:
    if regime == 0:
        return {v: vertex_weights.get(v, 0) for v in region.interior_vertices}
    potential: Dict[int, int] = defaultdict(int)
    for e in region.boundary:
        for v in e:
            potential[v] += graph.edges[e]["length"]
    return dict(potential)


def _close_small(graph: nx.Graph, region: Region) -> Region:
    context = flatten(graph, region)
    closing = set()
    for comp in nx.connected_components(context):
        closing |= length_spt(context.subgraph(comp), min(comp)).edges
    return replace(region, boundary=region.boundary | closing)


def _separate(
    graph: nx.Graph,
    region: Region,
    regime: int,
    vertex_weights: Mapping[int, int],
    budget: int,
    root: Optional[int],
) -> Optional[Tuple[FrozenSet[EdgeKey], FrozenSet[EdgeKey], FrozenSet[EdgeKey], SeparatorStats, int]]:
    """One separator step; returns (path, inside edges, outside edges, stats, escalations) or None if vacuous."""
    context = flatten(graph, region)
    components = boundary_component_sets(region) if regime == 1 else []
    contracted = contract(context, components)
    if regime == 1:
        weights = {contracted.node_of[min(c)]: 1 for c in components}
    else:
        weights = _regime_weights(graph, region, regime, vertex_weights)
    cgraph = contracted.graph
    if cgraph.number_of_nodes() < 3 or sum(weights.values()) == 0:
        return None

    sep_root = contracted.node_of.get(root, None) if root is not None else None
    escalations = 0
    ceiling = max(budget, sum(d["length"] for _, _, d in cgraph.edges(data=True)))
    while True:
        try:
            separator = lc_separator(cgraph, weights, budget, root=sep_root)
            break
        except InfiniteDiameterError:
            if budget >= ceiling:
                raise
            budget = min(2 * budget if budget else 1, ceiling)
            escalations += 1
            logger.warning("division_budget_escalated", region=region.region_id, budget=budget)

    by_orig: Dict[EdgeKey, List[EdgeKey]] = defaultdict(list)
    for a, b, data in cgraph.edges(data=True):
        by_orig[data["orig"]].append(edge_key(a, b))
    part = separator.cycle
    cycle_nodes = part.cycle_vertices

    path = set(contracted.origins(separator.path_edges))
    cycle_members = contracted.expand(cycle_nodes)
    for comp in components:
        if comp & cycle_members:
            path |= {e for e in region.boundary if e[0] in comp and e[1] in comp}

    inside, outside = set(), set()
    closing = None if separator.closing_synthetic else separator.closing_edge
    for e in region.edges:
        if e in path:
            continue
        pieces = by_orig.get(e)
        if not pieces:
            node = contracted.node_of[e[0]]
            (outside if node in part.outside else inside).add(e)
        elif closing in pieces:
            inside.add(e)
        elif pieces[0] in part.outside_edges:
            outside.add(e)
        else:
            inside.add(e)
    return frozenset(path), frozenset(inside), frozenset(outside), separator.stats, escalations


def lc_division(
    graph: nx.Graph,
    region: Region,
    alpha,
    h: int,
    vertex_weights: Optional[Mapping[int, int]] = None,
    root: Optional[int] = None,
    ids: Optional[Iterator[int]] = None,
) -> Division:
    """
    Length-constrained alpha-division of ``region``.

    Separators are applied for ``division_levels(alpha)`` levels per branch, cycling
    the weighting regimes: interior vertex weight, one unit per boundary component
    (components contracted), and boundary length at each vertex. Vacuous regimes are
    skipped without using a level.
    """
    weights = vertex_weights if vertex_weights is not None else {v: 1 for v in graph.nodes}
    ids = ids if ids is not None else itertools.count(region.region_id + 1)
    levels = division_levels(alpha)

    if region.interior_weight(weights) == 0:
        return Division(parent=region, children=(region,))

    leaves: List[Region] = []
    stats: List[SeparatorStats] = []
    escalations = 0
    stack = [(region.edges, region.boundary, 0, 0)]
    while stack:
        edges, boundary, regime, used = stack.pop()
        current = Region(region_id=-1, edges=edges, boundary=boundary)
        if current.interior_weight(weights) == 0 or used >= levels:
            leaves.append(current)
            continue
        if len(current.vertices) <= 3:
            leaves.append(_close_small(graph, current))
            continue

        step = None
        for offset in range(3):
            step_regime = (regime + offset) % 3
            try:
                step = _separate(graph, current, step_regime, weights, h, root)
            except NoBalancedCycleError:
                logger.warning("no_balanced_cycle", regime=step_regime, edges=len(edges))
                step = None
            if step is not None:
                break
        if step is None:
            leaves.append(_close_small(graph, current))
            continue

        path, inside, outside, sep_stats, escalated = step
        stats.append(sep_stats)
        escalations += escalated
        sides = []
        for side in (inside, outside):
            side_edges = path | side
            sides.append((side_edges, path | (side_edges & boundary)))
        kept = [s for s in sides if s[0] - path] or sides[:1]
        for side_edges, side_boundary in reversed(kept):
            stack.append((side_edges, side_boundary, step_regime + 1, used + 1))

    children = tuple(
        Region(region_id=next(ids), edges=c.edges, boundary=c.boundary, parent=region.region_id, depth=region.depth + 1)
        for c in sorted(leaves, key=lambda r: sorted(r.edges))
    )
    logger.debug(
        "division_computed",
        region=region.region_id,
        children=len(children),
        separators=len(stats),
        levels=levels,
    )
    return Division(parent=region, children=children, separators=tuple(stats), budget_escalations=escalations)


def check_feasible(graph: nx.Graph, root: int, h: int) -> Dict[int, int]:
    """Length-SPT feasibility: every vertex within length h of the root."""
    dist = length_distances(graph, root)
    for v in sorted(graph.nodes):
        if dist.get(v, math.inf) > h:
            raise InfeasibleInstanceError(f"vertex {v} is farther than h={h} from root {root}", vertex=v)
    return dist


def build_hierarchy(
    graph: nx.Graph,
    alpha,
    h: int,
    vertex_weights: Optional[Mapping[int, int]] = None,
    root: int = 0,
) -> Hierarchy:
    """Recursive 2h-length alpha-divisions until no interior vertex carries weight."""
    check_feasible(graph, root, h)
    weights = vertex_weights if vertex_weights is not None else {v: 1 for v in graph.nodes}
    budget = 2 * h
    ids = itertools.count(1)

    top = Region(region_id=0, edges=frozenset(edge_key(u, v) for u, v in graph.edges))
    regions: Dict[int, Region] = {0: top}
    children: Dict[int, Tuple[int, ...]] = {}
    divisions: Dict[int, Division] = {}

    queue = deque([top])
    while queue:
        region = queue.popleft()
        if region.interior_weight(weights) == 0:
            children[region.region_id] = ()
            continue
        division = lc_division(graph, region, alpha, budget, weights, root=root, ids=ids)
        divisions[region.region_id] = division
        children[region.region_id] = tuple(c.region_id for c in division.children)
        for child in division.children:
            regions[child.region_id] = child
            queue.append(child)

    hierarchy = Hierarchy(
        graph=graph,
        root_vertex=root,
        alpha=Fraction(alpha),
        h=h,
        budget=budget,
        regions=regions,
        children=children,
        divisions=divisions,
    )
    logger.info("hierarchy_built", regions=len(regions), depth=hierarchy.depth, leaves=len(hierarchy.leaves))
    return hierarchy


def restriction(graph: nx.Graph, tree_edges: Iterable[EdgeKey], region: Region) -> Tuple[FrozenSet[EdgeKey], int]:
    """E(T) restricted to E(H) minus E(L_H), with its weight."""
    kept = frozenset(edge_key(*e) for e in tree_edges) & (region.edges - region.boundary)
    return kept, sum(graph.edges[e]["weight"] for e in kept)
