"""Partition boundary components into few connected pieces of small induced diameter."""
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Tuple

import networkx as nx

from lcmst.core.exceptions import PieceBudgetError
from lcmst.core.logger import get_logger
from lcmst.graph.trees import length_spt

logger = get_logger(__name__)


@dataclass(frozen=True)
class PiecePartition:
    """Pieces V_1..V_k of one connected component, with induced diameters."""

    pieces: Tuple[FrozenSet[int], ...]
    diameters: Tuple[int, ...]
    beta: Fraction
    budget: int
    long_edge_cuts: int = 0
    far_vertex_cuts: int = 0

    @property
    def count(self) -> int:
        return len(self.pieces)

    @property
    def diameter_bound(self) -> Fraction:
        return Fraction(self.budget) / self.beta

    @property
    def vertices(self) -> FrozenSet[int]:
        return frozenset().union(*self.pieces)


def induced_diameter(component: nx.Graph, vertices) -> int:
    """Length diameter of ``component[vertices]``."""
    sub = component.subgraph(vertices)
    worst = 0
    for _, dist in nx.all_pairs_dijkstra_path_length(sub, weight="length"):
        if len(dist) < len(sub):
            raise ValueError("piece is not connected")
        worst = max(worst, max(dist.values()))
    return worst


def partition_boundary(component: nx.Graph, beta, budget: Optional[int] = None) -> PiecePartition:
    """
    Cut a length shortest-path tree of ``component`` into pieces.

    Tree edges longer than ``budget / (4 beta)`` are removed first. A bottom-up pass
    then detaches every vertex whose remaining subtree reaches farther than that
    threshold while all of its children stay within it. ``budget`` defaults to the
    component's total length.
    """
    beta = Fraction(beta)
    total = sum(d["length"] for _, _, d in component.edges(data=True))
    budget = total if budget is None else budget
    if total > budget:
        raise PieceBudgetError(f"component length {total} exceeds piece budget {budget}")
    if component.number_of_nodes() == 0:
        return PiecePartition(pieces=(), diameters=(), beta=beta, budget=budget)

    threshold = Fraction(budget) / (4 * beta)
    tree = length_spt(component, min(component.nodes))
    if len(tree.parent) != component.number_of_nodes():
        raise ValueError("boundary component must be connected")

    parent: Dict[int, Optional[int]] = dict(tree.parent)
    long_cuts = 0
    for v, p in sorted(tree.parent.items()):
        if p is not None and component[p][v]["length"] > threshold:
            parent[v] = None
            long_cuts += 1

    kids: Dict[int, List[int]] = {v: [] for v in parent}
    for v, p in parent.items():
        if p is not None:
            kids[p].append(v)

    far_cuts = 0
    reach: Dict[int, int] = {}
    order = [v for v in reversed(tree.preorder())]
    for v in order:
        reach[v] = max((component[v][c]["length"] + reach[c] for c in kids[v] if parent[c] == v), default=0)
        if parent[v] is not None and reach[v] > threshold:
            parent[v] = None
            far_cuts += 1

    members: Dict[int, set] = {}
    for v in tree.preorder():
        top = v if parent[v] is None else members_root(parent, v)
        members.setdefault(top, set()).add(v)

    pieces = tuple(sorted((frozenset(m) for m in members.values()), key=min))
    diameters = tuple(induced_diameter(component, p) for p in pieces)
    logger.debug(
        "boundary_partitioned",
        vertices=component.number_of_nodes(),
        pieces=len(pieces),
        long_edge_cuts=long_cuts,
        far_vertex_cuts=far_cuts,
    )
    return PiecePartition(
        pieces=pieces,
        diameters=diameters,
        beta=beta,
        budget=budget,
        long_edge_cuts=long_cuts,
        far_vertex_cuts=far_cuts,
    )


def members_root(parent: Dict[int, Optional[int]], v: int) -> int:
    while parent[v] is not None:
        v = parent[v]
    return v


def boundary_graph(graph: nx.Graph, boundary_edges) -> nx.Graph:
    """Boundary subgraph with original lengths."""
    sub = nx.Graph()
    for u, v in boundary_edges:
        sub.add_edge(u, v, length=graph[u][v]["length"], weight=graph[u][v]["weight"])
    return sub


def partition_region_boundary(
    graph: nx.Graph, boundary_edges, beta, h: int
) -> Tuple[Tuple[FrozenSet[int], ...], List[PiecePartition]]:
    """
    Pieces of every boundary component, each of induced diameter at most ``h / beta``.

    A component of length L is partitioned with budget max(L, h) and resolution
    beta * max(L, h) / h.
    """
    beta = Fraction(beta)
    sub = boundary_graph(graph, boundary_edges)
    partitions = []
    for comp in sorted(nx.connected_components(sub), key=min):
        component = sub.subgraph(comp).copy()
        length = sum(d["length"] for _, _, d in component.edges(data=True))
        budget = max(length, h)
        partitions.append(partition_boundary(component, beta * budget / h, budget))
    pieces = tuple(sorted((p for part in partitions for p in part.pieces), key=min))
    return pieces, partitions
