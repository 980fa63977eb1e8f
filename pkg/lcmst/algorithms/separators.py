"""Weighted fundamental-cycle separators and length-constrained separators."""
import math
from dataclasses import dataclass
from typing import FrozenSet, Hashable, List, Mapping, Optional

import networkx as nx

from lcmst.algorithms.metrics import lc_diameter, mixture_sp_tree
from lcmst.core.exceptions import InfiniteDiameterError, NoBalancedCycleError
from lcmst.core.logger import get_logger
from lcmst.graph.embedding import (
    CyclePartition,
    PlanarEmbedding,
    classify_inside_outside,
    embed_planar,
    fundamental_cycle,
    triangulate,
)
from lcmst.graph.instance import EdgeKey
from lcmst.graph.trees import SpanningTree

logger = get_logger(__name__)


@dataclass(frozen=True)
class SeparatorStats:
    length: int
    weight: int
    weight_inside: int
    weight_outside: int
    total_weight: int
    h: int
    diam_h: int


@dataclass(frozen=True)
class Separator:
    """
    Path ``P1 + P2`` of tree edges plus the edge closing it into a cycle.

    ``closing_edge`` is synthetic when ``closing_synthetic`` is set; a real closing
    edge is not part of ``path_edges`` and lies on neither side.
    """

    path_edges: FrozenSet[EdgeKey]
    closing_edge: EdgeKey
    closing_synthetic: bool
    cycle: CyclePartition
    stats: Optional[SeparatorStats] = None

    @property
    def path_vertices(self) -> FrozenSet[int]:
        return frozenset(v for e in self.path_edges for v in e) | frozenset(self.closing_edge)


def is_balanced(side_weight: int, total_weight: int) -> bool:
    return 3 * side_weight <= 2 * total_weight


def _side_weight(vertices, weights: Mapping[int, int]) -> int:
    return sum(weights.get(v, 0) for v in vertices)


def _span_synthetic_vertices(tree: SpanningTree, embedding: PlanarEmbedding) -> SpanningTree:
    if not embedding.synthetic_vertices:
        return tree
    parent = dict(tree.parent)
    for hub in sorted(embedding.synthetic_vertices):
        parent[hub] = min(v for v in embedding.rotation[hub] if v in parent)
    return SpanningTree(root=tree.root, parent=parent)


def cycle_separator(
    embedding: PlanarEmbedding,
    vertex_weights: Mapping[int, int],
    tree: SpanningTree,
) -> Separator:
    """
    Scan non-tree edges in key order and return the first balanced fundamental cycle.

    The embedding must be triangulated and ``tree`` must span it.
    """
    total = _side_weight(embedding.rotation, vertex_weights)
    if total <= 0:
        raise ValueError("vertex weights must not all be zero")

    faces = embedding.face_index()
    tree = _span_synthetic_vertices(tree, embedding)
    scanned = 0
    for e in embedding.edges:
        if tree.contains_edge(*e):
            continue
        scanned += 1
        p1, p2 = fundamental_cycle(tree, e)
        path = frozenset(p1) | frozenset(p2)
        if path & embedding.synthetic_edges:
            continue
        partition = classify_inside_outside(embedding, path | {e}, face_index=faces)
        inside = _side_weight(partition.inside, vertex_weights)
        outside = _side_weight(partition.outside, vertex_weights)
        if is_balanced(inside, total) and is_balanced(outside, total):
            logger.debug("cycle_separator_found", candidates=scanned, inside=inside, outside=outside, total=total)
            return Separator(
                path_edges=path,
                closing_edge=e,
                closing_synthetic=e in embedding.synthetic_edges,
                cycle=partition,
            )
    raise NoBalancedCycleError(f"no balanced fundamental cycle among {scanned} candidates")


def lc_separator(
    graph: nx.Graph,
    vertex_weights: Mapping[int, int],
    h: int,
    root: Optional[Hashable] = None,
    embedding: Optional[PlanarEmbedding] = None,
) -> Separator:
    """
    Length-constrained separator: mixture-metric tree first, then triangulate and scan.

    Path edges are real edges of ``graph`` with ``l(P) <= 4h`` and ``w(P) <= 4 D^(h)``.
    """
    diam = lc_diameter(graph, h)
    if diam == math.inf:
        raise InfiniteDiameterError(f"D^({h}) of a {graph.number_of_nodes()}-vertex graph is infinite")
    root = min(graph.nodes) if root is None else root
    tree = mixture_sp_tree(graph, h, root, diam_h=diam)
    triangulated = triangulate(embedding or embed_planar(graph))
    separator = cycle_separator(triangulated, vertex_weights, tree)

    total = _side_weight(graph.nodes, vertex_weights)
    stats = SeparatorStats(
        length=sum(graph.edges[e]["length"] for e in separator.path_edges),
        weight=sum(graph.edges[e]["weight"] for e in separator.path_edges),
        weight_inside=_side_weight(separator.cycle.inside, vertex_weights),
        weight_outside=_side_weight(separator.cycle.outside, vertex_weights),
        total_weight=total,
        h=h,
        diam_h=int(diam),
    )
    return Separator(
        path_edges=separator.path_edges,
        closing_edge=separator.closing_edge,
        closing_synthetic=separator.closing_synthetic,
        cycle=separator.cycle,
        stats=stats,
    )


def separator_violations(separator: Separator, graph: nx.Graph) -> List[str]:
    """Names of the separator inequalities that fail."""
    stats = separator.stats
    part = separator.cycle
    checks = {
        "balance_inside": is_balanced(stats.weight_inside, stats.total_weight),
        "balance_outside": is_balanced(stats.weight_outside, stats.total_weight),
        "length": stats.length <= 4 * stats.h,
        "weight": stats.weight <= 4 * stats.diam_h,
        "real_path": all(graph.has_edge(*e) for e in separator.path_edges),
        "separated": not any(
            (u in part.inside and v in part.outside) or (u in part.outside and v in part.inside)
            for u, v in graph.edges
        ),
    }
    return [name for name, ok in checks.items() if not ok]
