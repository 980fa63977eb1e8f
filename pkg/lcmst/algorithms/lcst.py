"""Length-constrained Steiner trees: layered expansion, recursive greedy and an exact solver."""
import heapq
import math
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

import networkx as nx

from lcmst.algorithms.steiner_dp import steiner_arborescence
from lcmst.core.config import get_settings
from lcmst.core.exceptions import LayerCapExceededError, TooLargeError
from lcmst.core.logger import get_logger

logger = get_logger(__name__)

LayerNode = Tuple[int, int]
LayerArc = Tuple[LayerNode, LayerNode]


@dataclass(frozen=True)
class LcstInstance:
    """
    Root, terminals and length bound over an explicit edge list.

    ``edges`` holds ``(u, v, length, weight)``; solutions refer to edges by position,
    so parallel edges are allowed. Edges at a vertex in ``sinks`` are only usable
    towards it.
    """

    edges: Tuple[Tuple[int, int, int, int], ...]
    root: int
    terminals: FrozenSet[int]
    h: int
    sinks: FrozenSet[int] = frozenset()
    directed: bool = False

    @property
    def vertices(self) -> FrozenSet[int]:
        return frozenset(v for e in self.edges for v in e[:2]) | {self.root} | self.terminals

    def arcs(self) -> Iterable[Tuple[int, int, int, int, int]]:
        """Usable arcs ``(tail, head, length, weight, edge index)``."""
        for idx, (u, v, length, weight) in enumerate(self.edges):
            pairs = ((u, v),) if self.directed else ((u, v), (v, u))
            for a, b in pairs:
                if a in self.sinks or b == self.root:
                    continue
                yield a, b, length, weight, idx

    def weight_of(self, edge_ids: Iterable[int]) -> int:
        return sum(self.edges[i][3] for i in set(edge_ids))


@dataclass(frozen=True)
class LcstResult:
    edges: FrozenSet[int]
    weight: float
    feasible: bool
    stats: Dict[str, int] = field(default_factory=dict)

    @classmethod
    def fail(cls, **stats) -> "LcstResult":
        return cls(edges=frozenset(), weight=math.inf, feasible=False, stats=stats)


@dataclass(frozen=True)
class LayeredDst:
    """Layered digraph on copies (v, i); stay arcs carry ``edge=None``."""

    graph: nx.DiGraph
    root: LayerNode
    terminals: Dict[int, LayerNode]
    h: int

    def project(self, arcs: Iterable[LayerArc]) -> FrozenSet[int]:
        out = set()
        for a, b in arcs:
            idx = self.graph[a][b]["edge"]
            if idx is not None:
                out.add(idx)
        return frozenset(out)

    def arc_weight(self, arcs: Iterable[LayerArc]) -> int:
        return sum(self.graph[a][b]["weight"] for a, b in set(arcs))


def layer(instance: LcstInstance, layer_cap: Optional[int] = None) -> LayeredDst:
    """Copies v_0..v_h of every vertex (the root only in layer 0); an edge of length l joins u_i to v_{i+l}."""
    cap = get_settings().layer_cap if layer_cap is None else layer_cap
    h = instance.h
    if h + 1 > cap:
        raise LayerCapExceededError(f"{h + 1} layers exceed the layer cap {cap}")

    graph = nx.DiGraph()
    root = (instance.root, 0)
    graph.add_node(root)
    for v in sorted(instance.vertices - {instance.root}):
        for i in range(h + 1):
            graph.add_node((v, i))
        for i in range(h):
            graph.add_edge((v, i), (v, i + 1), weight=0, edge=None)

    for a, b, length, weight, idx in instance.arcs():
        starts = [0] if a == instance.root else range(h - length + 1)
        for i in starts:
            if i + length > h:
                continue
            tail, head = (a, i), (b, i + length)
            current = graph.get_edge_data(tail, head)
            if current is None or weight < current["weight"]:
                graph.add_edge(tail, head, weight=weight, edge=idx)

    terminals = {t: (t, h) for t in sorted(instance.terminals - {instance.root})}
    return LayeredDst(graph=graph, root=root, terminals=terminals, h=h)


class _RecursiveGreedy:
    """Recursive greedy over a layered digraph with shortest-path tables memoised."""

    def __init__(self, layered: LayeredDst):
        self.layered = layered
        self.graph = layered.graph
        self.reverse = self.graph.reverse(copy=False)
        self.to_terminal: Dict[int, Tuple[Dict, Dict]] = {}
        self.from_node: Dict[LayerNode, Tuple[Dict, Dict]] = {}
        self.bundles: Dict[Tuple[LayerNode, FrozenSet[int]], List] = {}
        for t, node in layered.terminals.items():
            pred, dist = nx.dijkstra_predecessor_and_distance(self.reverse, node, weight="weight")
            self.to_terminal[t] = (dist, {v: min(p, key=repr) for v, p in pred.items() if p})

    def _forward(self, source: LayerNode) -> Tuple[Dict, Dict]:
        if source not in self.from_node:
            pred, dist = nx.dijkstra_predecessor_and_distance(self.graph, source, weight="weight")
            self.from_node[source] = (dist, {v: min(p, key=repr) for v, p in pred.items() if p})
        return self.from_node[source]

    def _path_to_terminal(self, v: LayerNode, t: int) -> Set[LayerArc]:
        _, nxt = self.to_terminal[t]
        arcs = set()
        while v in nxt:
            arcs.add((v, nxt[v]))
            v = nxt[v]
        return arcs

    def _path_from(self, source: LayerNode, v: LayerNode) -> Set[LayerArc]:
        _, pred = self._forward(source)
        arcs = set()
        while v in pred:
            arcs.add((pred[v], v))
            v = pred[v]
        return arcs

    def _cost(self, arcs: Iterable[LayerArc]) -> int:
        return sum(self.graph[a][b]["weight"] for a, b in arcs)

    def _bundles(self, v: LayerNode, pending: FrozenSet[int]) -> List[Tuple[FrozenSet[LayerArc], FrozenSet[int]]]:
        """Unions of shortest paths from ``v`` to its 1, 2, ... closest pending terminals."""
        key = (v, pending)
        if key not in self.bundles:
            reach = sorted(
                (self.to_terminal[t][0][v], t) for t in pending if v in self.to_terminal[t][0]
            )
            arcs: Set[LayerArc] = set()
            covered: List[int] = []
            prefixes = []
            for _, t in reach:
                arcs |= self._path_to_terminal(v, t)
                covered.append(t)
                prefixes.append((frozenset(arcs), frozenset(covered)))
            self.bundles[key] = prefixes
        return self.bundles[key]

    def solve(self, level: int, k: int, root: LayerNode, pending: FrozenSet[int]):
        """Tree from ``root`` covering ``k`` pending terminals (fewer if unreachable)."""
        if level <= 1:
            prefixes = self._bundles(root, pending)
            if not prefixes or k < 1:
                return frozenset(), frozenset()
            return prefixes[min(k, len(prefixes)) - 1]

        tree: Set[LayerArc] = set()
        covered: Set[int] = set()
        remaining = set(pending)
        dist, _ = self._forward(root)
        while k > 0 and remaining:
            best_key, best = None, None
            frozen = frozenset(remaining)
            for v in sorted(dist, key=repr):
                if not any(v in self.to_terminal[t][0] for t in remaining):
                    continue
                head = self._path_from(root, v)
                for kk in range(1, min(k, len(remaining)) + 1):
                    sub_arcs, sub_cov = self.solve(level - 1, kk, v, frozen)
                    if not sub_cov:
                        break
                    arcs = frozenset(head) | sub_arcs
                    cost = self._cost(arcs)
                    key = (cost / len(sub_cov), cost, tuple(sorted(sub_cov)))
                    if best_key is None or key < best_key:
                        best_key, best = key, (arcs, sub_cov)
                    if len(sub_cov) < kk:
                        break
            if best is None:
                break
            tree |= best[0]
            covered |= best[1]
            remaining -= best[1]
            k -= len(best[1])
        return frozenset(tree), frozenset(covered)


def recursive_greedy(layered: LayeredDst, levels: int) -> Optional[FrozenSet[LayerArc]]:
    """Recursive greedy Steiner arborescence; None when some terminal is unreachable."""
    if levels < 1:
        raise ValueError("levels must be at least 1")
    if not layered.terminals:
        return frozenset()
    greedy = _RecursiveGreedy(layered)
    terminals = frozenset(layered.terminals)
    arcs, covered = greedy.solve(levels, len(terminals), layered.root, terminals)
    if covered != terminals:
        return None
    return arcs


def levels_for(delta: float) -> int:
    return max(1, math.ceil(1 / delta))


def lcst_feasible(instance: LcstInstance, edge_ids: Iterable[int]) -> bool:
    """Every terminal within length h of the root using only ``edge_ids``."""
    chosen = set(edge_ids)
    adj: Dict[int, List[Tuple[int, int]]] = {}
    for a, b, length, _, idx in instance.arcs():
        if idx in chosen:
            adj.setdefault(a, []).append((b, length))
    dist = {instance.root: 0}
    heap = [(0, instance.root)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist.get(u, math.inf):
            continue
        for v, length in adj.get(u, ()):
            if d + length < dist.get(v, math.inf):
                dist[v] = d + length
                heapq.heappush(heap, (d + length, v))
    return all(dist.get(t, math.inf) <= instance.h for t in instance.terminals)


def lcst_approx(instance: LcstInstance, delta: float = 0.5, layer_cap: Optional[int] = None) -> LcstResult:
    """Layer, run the recursive greedy with ceil(1/delta) levels, project back; never raises on infeasibility."""
    terminals = instance.terminals - {instance.root}
    if not terminals:
        return LcstResult(edges=frozenset(), weight=0, feasible=True)
    if not lcst_feasible(instance, range(len(instance.edges))):
        return LcstResult.fail(unreachable=1)
    layered = layer(instance, layer_cap)
    levels = levels_for(delta)
    arcs = recursive_greedy(layered, levels)
    if arcs is None:
        logger.debug("lcst_failed", terminals=len(terminals), h=instance.h)
        return LcstResult.fail(layered_nodes=layered.graph.number_of_nodes())
    edges = layered.project(arcs)
    return LcstResult(
        edges=edges,
        weight=instance.weight_of(edges),
        feasible=True,
        stats={"layered_nodes": layered.graph.number_of_nodes(), "levels": levels},
    )


def _contract_free_edges(instance: LcstInstance) -> Tuple[LcstInstance, FrozenSet[int], Dict[int, int]]:
    """Merge endpoints of length-0 weight-0 edges away from sinks; returns (instance, merged edges, edge map)."""
    graph = nx.Graph()
    graph.add_nodes_from(instance.vertices)
    free = [
        i for i, (u, v, length, weight) in enumerate(instance.edges)
        if length == 0 and weight == 0 and u not in instance.sinks and v not in instance.sinks
    ]
    if instance.directed or not free:
        return instance, frozenset(), {i: i for i in range(len(instance.edges))}
    graph.add_edges_from((instance.edges[i][0], instance.edges[i][1]) for i in free)
    groups = [c for c in nx.connected_components(graph) if len(c) > 1]
    node_of = {v: v for v in graph.nodes}
    for group in groups:
        rep = instance.root if instance.root in group else min(group)
        node_of.update((v, rep) for v in group)

    edges, edge_map = [], {}
    for i, (u, v, length, weight) in enumerate(instance.edges):
        a, b = node_of[u], node_of[v]
        if a == b:
            continue
        edge_map[len(edges)] = i
        edges.append((a, b, length, weight))
    reduced = LcstInstance(
        edges=tuple(edges),
        root=node_of[instance.root],
        terminals=frozenset(node_of[t] for t in instance.terminals),
        h=instance.h,
        sinks=instance.sinks,
    )
    return reduced, frozenset(free), edge_map


def _subset_search(instance: LcstInstance) -> Optional[Tuple[FrozenSet[int], int]]:
    """Include/exclude search over edges, pruned by weight and by reachability."""
    order = sorted(range(len(instance.edges)), key=lambda i: (-instance.edges[i][3], i))
    best: List = [None, math.inf]

    def visit(pos: int, chosen: FrozenSet[int], weight: int, undecided: FrozenSet[int]) -> None:
        if weight >= best[1]:
            return
        if not lcst_feasible(instance, chosen | undecided):
            return
        if lcst_feasible(instance, chosen):
            best[0], best[1] = chosen, weight
            return
        if pos == len(order):
            return
        idx = order[pos]
        rest = undecided - {idx}
        visit(pos + 1, chosen, weight, rest)
        visit(pos + 1, chosen | {idx}, weight + instance.edges[idx][3], rest)

    visit(0, frozenset(), 0, frozenset(range(len(instance.edges))))
    return None if best[0] is None else (best[0], best[1])


def lcst_exact(instance: LcstInstance, layer_cap: Optional[int] = None) -> LcstResult:
    """
    Minimum-weight feasible edge set.

    Free edges (length and weight 0) are contracted first. Small instances are
    solved by subset search, larger ones by the subset dynamic program on the
    layered graph. Raises TooLargeError beyond the configured caps.
    """
    settings = get_settings()
    if not instance.terminals - {instance.root}:
        return LcstResult(edges=frozenset(), weight=0, feasible=True)

    reduced, free, edge_map = _contract_free_edges(instance)
    terminals = reduced.terminals - {reduced.root}
    if not terminals:
        return LcstResult(edges=free, weight=0, feasible=True)

    if len(reduced.edges) <= settings.exact_subset_edge_cap:
        found = _subset_search(reduced)
        method = "subsets"
        edges = None if found is None else frozenset(edge_map[i] for i in found[0])
    elif len(terminals) <= settings.exact_terminal_cap:
        layered = layer(reduced, layer_cap)
        solution = steiner_arborescence(
            layered.graph, layered.root, [frozenset({node}) for node in layered.terminals.values()]
        )
        method = "layered-dp"
        edges = None if solution is None else frozenset(edge_map[i] for i in layered.project(solution.arcs))
    else:
        raise TooLargeError(
            f"{len(reduced.edges)} edges and {len(terminals)} terminals exceed the exact caps"
        )

    if edges is None:
        logger.debug("lcst_exact_infeasible", method=method)
        return LcstResult.fail()
    edges = edges | free
    return LcstResult(edges=edges, weight=instance.weight_of(edges), feasible=True, stats={"edges": len(reduced.edges)})
