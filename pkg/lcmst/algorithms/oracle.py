"""Exact solvers for tiny instances: the ground truth for ratio and reduction checks."""
import math
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

import networkx as nx

from lcmst.algorithms.lcst import LcstInstance, lcst_exact
from lcmst.algorithms.steiner_dp import steiner_arborescence
from lcmst.api.schemas import ProblemKind
from lcmst.core.config import Settings, get_settings
from lcmst.core.exceptions import TooLargeError
from lcmst.core.logger import get_logger
from lcmst.graph.instance import EdgeKey, Instance, edge_key
from lcmst.graph.trees import edge_subgraph, length_distances, length_spt

logger = get_logger(__name__)


@dataclass(frozen=True)
class ExactResult:
    """Optimal weight and one optimal edge set; ``weight is None`` marks an infeasible instance."""

    weight: Optional[int]
    edges: FrozenSet[EdgeKey]
    candidates: int = 0
    method: str = ""

    @property
    def feasible(self) -> bool:
        return self.weight is not None


INFEASIBLE = ExactResult(weight=None, edges=frozenset(), method="length-spt")


def lcmst_feasible(instance: Instance) -> bool:
    dist = length_distances(instance.to_graph(), instance.root)
    return len(dist) == instance.vertex_count and max(dist.values(), default=0) <= instance.h


class _SpanningTreeSearch:
    """Include/exclude search over edges with Kruskal and root-distance pruning."""

    def __init__(self, instance: Instance):
        self.instance = instance
        self.n = instance.vertex_count
        self.edges = sorted(instance.edges, key=lambda e: (e.weight, e.length, e.key))
        self.best_weight = math.inf
        self.best: Optional[FrozenSet[EdgeKey]] = None
        self.candidates = 0

    @staticmethod
    def _find(parent: List[int], v: int) -> int:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    def _forest(self, chosen: List) -> Tuple[List[int], int]:
        parent = list(range(self.n))
        parts = self.n
        for e in chosen:
            a, b = self._find(parent, e.u), self._find(parent, e.v)
            if a != b:
                parent[a] = b
                parts -= 1
        return parent, parts

    def _completion_bound(self, parent: List[int], parts: int, pos: int) -> Optional[int]:
        """Kruskal weight needed to join the forest with edges from ``pos`` on; None if impossible."""
        parent = list(parent)
        extra = 0
        for e in self.edges[pos:]:
            if parts == 1:
                break
            a, b = self._find(parent, e.u), self._find(parent, e.v)
            if a != b:
                parent[a] = b
                parts -= 1
                extra += e.weight
        return extra if parts == 1 else None

    def _root_component_ok(self, chosen: List) -> bool:
        """Forest paths are unique, so a traversal from the root gives exact distances."""
        adj: Dict[int, List[Tuple[int, int]]] = {}
        for e in chosen:
            adj.setdefault(e.u, []).append((e.v, e.length))
            adj.setdefault(e.v, []).append((e.u, e.length))
        root, h = self.instance.root, self.instance.h
        dist = {root: 0}
        stack = [root]
        while stack:
            u = stack.pop()
            for v, length in adj.get(u, ()):
                if v not in dist:
                    dist[v] = dist[u] + length
                    if dist[v] > h:
                        return False
                    stack.append(v)
        return True

    def run(self) -> None:
        self._visit(0, [], 0)

    def _visit(self, pos: int, chosen: List, weight: int) -> None:
        if len(chosen) == self.n - 1:
            self.candidates += 1
            if weight < self.best_weight:
                self.best_weight, self.best = weight, frozenset(e.key for e in chosen)
            return
        parent, parts = self._forest(chosen)
        bound = self._completion_bound(parent, parts, pos)
        if bound is None or weight + bound >= self.best_weight or pos == len(self.edges):
            return
        e = self.edges[pos]
        if self._find(parent, e.u) != self._find(parent, e.v):
            extended = chosen + [e]
            if self._root_component_ok(extended):
                self._visit(pos + 1, extended, weight + e.weight)
        self._visit(pos + 1, chosen, weight)


def exact_lcmst(instance: Instance, settings: Optional[Settings] = None) -> ExactResult:
    """Minimum-weight spanning tree with every root distance at most h."""
    settings = settings or get_settings()
    if not lcmst_feasible(instance):
        return INFEASIBLE
    if instance.vertex_count == 1:
        return ExactResult(weight=0, edges=frozenset(), method="trivial")

    if len(instance.edges) <= settings.exact_edge_cap:
        search = _SpanningTreeSearch(instance)
        search.run()
        logger.debug("exact_lcmst_enumerated", candidates=search.candidates, weight=search.best_weight)
        return ExactResult(
            weight=int(search.best_weight), edges=search.best, candidates=search.candidates, method="enumeration"
        )

    if instance.vertex_count - 1 > settings.exact_terminal_cap:
        raise TooLargeError(
            f"{len(instance.edges)} edges and {instance.vertex_count} vertices exceed the exact caps"
        )
    lcst = LcstInstance(
        edges=tuple((e.u, e.v, e.length, e.weight) for e in instance.edges),
        root=instance.root,
        terminals=frozenset(range(instance.vertex_count)) - {instance.root},
        h=instance.h,
    )
    result = lcst_exact(lcst, settings.layer_cap)
    graph = instance.to_graph()
    keys = [edge_key(*lcst.edges[i][:2]) for i in result.edges]
    tree = length_spt(edge_subgraph(graph, keys), instance.root)
    weight = sum(graph.edges[e]["weight"] for e in tree.edges)
    return ExactResult(weight=weight, edges=tree.edges, method="layered-dp")


def exact_lcst(instance: Instance, settings: Optional[Settings] = None) -> ExactResult:
    """Minimum-weight edge set reaching every terminal within length h."""
    settings = settings or get_settings()
    lcst = LcstInstance(
        edges=tuple((e.u, e.v, e.length, e.weight) for e in instance.edges),
        root=instance.root,
        terminals=frozenset(instance.terminals or ()),
        h=instance.h,
    )
    result = lcst_exact(lcst, settings.layer_cap)
    if not result.feasible:
        return ExactResult(weight=None, edges=frozenset(), method="lcst")
    return ExactResult(
        weight=int(result.weight),
        edges=frozenset(edge_key(*lcst.edges[i][:2]) for i in result.edges),
        method="lcst",
    )


def exact_dst(instance: Instance, settings: Optional[Settings] = None) -> ExactResult:
    """Minimum-weight arc set containing a root-to-terminal path for every terminal."""
    settings = settings or get_settings()
    terminals = frozenset(instance.terminals or ()) - {instance.root}
    if len(instance.edges) > settings.exact_edge_cap and len(terminals) > settings.exact_terminal_cap:
        raise TooLargeError(f"{len(instance.edges)} arcs and {len(terminals)} terminals exceed the exact caps")
    lcst = LcstInstance(
        edges=tuple((e.u, e.v, 0, e.weight) for e in instance.edges),
        root=instance.root,
        terminals=terminals,
        h=0,
        directed=True,
    )
    result = lcst_exact(lcst, settings.layer_cap)
    if not result.feasible:
        return ExactResult(weight=None, edges=frozenset(), method="dst")
    return ExactResult(
        weight=int(result.weight),
        edges=frozenset((lcst.edges[i][0], lcst.edges[i][1]) for i in result.edges),
        method="dst",
    )


def exact_gst(instance: Instance, settings: Optional[Settings] = None) -> ExactResult:
    """Minimum-weight tree joining the root to at least one vertex of every group."""
    settings = settings or get_settings()
    groups = list(instance.groups or ())
    if len(groups) > settings.exact_terminal_cap:
        raise TooLargeError(f"{len(groups)} groups exceed the exact terminal cap")
    graph = instance.to_graph()
    solution = steiner_arborescence(graph, instance.root, groups)
    if solution is None:
        return ExactResult(weight=None, edges=frozenset(), method="group-dp")
    edges = frozenset(edge_key(a, b) for a, b in solution.arcs)
    return ExactResult(weight=solution.weight, edges=edges, candidates=solution.states, method="group-dp")


def solve_exact(instance: Instance, settings: Optional[Settings] = None) -> ExactResult:
    solvers: Dict[ProblemKind, object] = {
        ProblemKind.LCMST: exact_lcmst,
        ProblemKind.LCST: exact_lcst,
        ProblemKind.DST: exact_dst,
        ProblemKind.GST: exact_gst,
    }
    return solvers[instance.kind](instance, settings)


def solution_weight(instance: Instance, edges: Iterable[EdgeKey]) -> int:
    return instance.weight_of({edge_key(*e, directed=instance.directed) for e in edges})


def is_feasible(instance: Instance, edges: Iterable[EdgeKey]) -> bool:
    """Feasibility of an edge set for the instance's own problem kind."""
    keys = {edge_key(*e, directed=instance.directed) for e in edges}
    if not keys <= set(instance.edge_map):
        return False
    sub = edge_subgraph(instance.to_graph(), keys)
    sub.add_node(instance.root)
    if instance.kind == ProblemKind.DST:
        reached = nx.descendants(sub, instance.root) | {instance.root}
        return set(instance.terminals or ()) <= reached
    if instance.kind == ProblemKind.GST:
        reached = nx.node_connected_component(sub, instance.root)
        return all(reached & g for g in instance.groups or ())
    dist = length_distances(sub, instance.root)
    required = range(instance.vertex_count) if instance.kind == ProblemKind.LCMST else instance.terminals or ()
    return all(dist.get(v, math.inf) <= instance.h for v in required)
