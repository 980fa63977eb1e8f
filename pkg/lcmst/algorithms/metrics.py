"""Length-constrained distances d^(h), diameters D^(h) and the mixture metric."""
import heapq
import math
from dataclasses import dataclass
from typing import Dict, Hashable, List, Mapping, Optional, Union

import networkx as nx
import numpy as np

from lcmst.core.exceptions import InfiniteDiameterError
from lcmst.core.logger import get_logger
from lcmst.graph.trees import SpanningTree, shortest_path_tree

logger = get_logger(__name__)

UNREACHABLE = np.iinfo(np.int64).max // 4

Distance = Union[int, float]


@dataclass(frozen=True)
class _ArcArrays:
    index: Mapping[Hashable, int]
    src: np.ndarray
    dst: np.ndarray
    length: np.ndarray
    weight: np.ndarray
    zero_out: List[List[tuple]]


def _arc_arrays(graph: nx.Graph) -> _ArcArrays:
    nodes = sorted(graph.nodes)
    index = {v: i for i, v in enumerate(nodes)}
    arcs = []
    for u, v, data in graph.edges(data=True):
        arcs.append((index[u], index[v], data["length"], data["weight"]))
        if not graph.is_directed():
            arcs.append((index[v], index[u], data["length"], data["weight"]))
    table = np.array(arcs, dtype=np.int64).reshape(-1, 4)
    zero_out = [[] for _ in nodes]
    for a, b, length, weight in arcs:
        if length == 0:
            zero_out[a].append((b, weight))
    return _ArcArrays(index, table[:, 0], table[:, 1], table[:, 2], table[:, 3], zero_out)


def _zero_length_closure(row: np.ndarray, zero_out: List[List[tuple]]) -> None:
    heap = [(int(d), i) for i, d in enumerate(row) if d < UNREACHABLE and zero_out[i]]
    heapq.heapify(heap)
    while heap:
        d, i = heapq.heappop(heap)
        if d > row[i]:
            continue
        for j, w in zero_out[i]:
            if d + w < row[j]:
                row[j] = d + w
                heapq.heappush(heap, (d + w, j))


@dataclass(frozen=True)
class LcDistanceTable:
    """``dist[b, i]``: least weight of a path of length <= b from ``source`` to vertex i."""

    source: Hashable
    h: int
    index: Mapping[Hashable, int]
    dist: np.ndarray

    def at(self, v: Hashable, budget: Optional[int] = None) -> Distance:
        b = self.h if budget is None else budget
        value = self.dist[b, self.index[v]]
        return math.inf if value >= UNREACHABLE else int(value)

    def row(self, budget: Optional[int] = None) -> Dict[Hashable, Distance]:
        b = self.h if budget is None else budget
        return {v: self.at(v, b) for v in self.index}


def _table(arrays: _ArcArrays, source: Hashable, h: int) -> np.ndarray:
    n = len(arrays.index)
    dist = np.full((h + 1, n), UNREACHABLE, dtype=np.int64)
    positive = arrays.length > 0
    has_zero = any(arrays.zero_out)
    for b in range(h + 1):
        row = dist[b - 1].copy() if b > 0 else np.full(n, UNREACHABLE, dtype=np.int64)
        if b == 0:
            row[arrays.index[source]] = 0
        usable = positive & (arrays.length <= b)
        if usable.any():
            prev = dist[b - arrays.length[usable], arrays.src[usable]]
            ok = prev < UNREACHABLE
            np.minimum.at(row, arrays.dst[usable][ok], prev[ok] + arrays.weight[usable][ok])
        if has_zero:
            _zero_length_closure(row, arrays.zero_out)
        dist[b] = row
    return dist


def lc_distance_table(graph: nx.Graph, source: Hashable, h: int) -> LcDistanceTable:
    """Budget-indexed relaxation over (vertex, budget) states."""
    arrays = _arc_arrays(graph)
    return LcDistanceTable(source=source, h=h, index=arrays.index, dist=_table(arrays, source, h))


def lc_distance(graph: nx.Graph, u: Hashable, v: Hashable, h: int) -> Distance:
    """d^(h)(u, v); ``math.inf`` when no path of length <= h exists."""
    if u == v:
        return 0
    return lc_distance_table(graph, u, h).at(v)


def lc_diameter(graph: nx.Graph, h: int) -> Distance:
    """D^(h): maximum of d^(h) over ordered vertex pairs."""
    if graph.number_of_nodes() <= 1:
        return 0
    arrays = _arc_arrays(graph)
    worst = 0
    for source in arrays.index:
        last = _table(arrays, source, h)[h]
        peak = int(last.max())
        if peak >= UNREACHABLE:
            return math.inf
        worst = max(worst, peak)
    return worst


@dataclass(frozen=True)
class MixtureWeighting:
    """h-mixture weights kept as integers: ``scaled(e) = h * w_mix(e)``."""

    h: int
    diam_h: int

    def scaled(self, length: int, weight: int) -> int:
        if self.h == 0:
            return weight
        return self.diam_h * length + self.h * weight

    def value(self, length: int, weight: int) -> float:
        return self.scaled(length, weight) / self.h if self.h else float(weight)


def mixture_weighting(graph: nx.Graph, h: int, diam_h: Optional[Distance] = None) -> MixtureWeighting:
    diam = lc_diameter(graph, h) if diam_h is None else diam_h
    if diam == math.inf:
        raise InfiniteDiameterError(f"D^({h}) is infinite")
    return MixtureWeighting(h=h, diam_h=int(diam))


def mixture_sp_tree(
    graph: nx.Graph,
    h: int,
    root: Hashable,
    diam_h: Optional[Distance] = None,
) -> SpanningTree:
    """
    Shortest-path tree under the h-mixture metric.

    Costs compare as (h * w_mix, length, hops) with ties to the smaller parent id;
    length precedes hops so that a zero diameter still yields short root paths.
    """
    mixture = mixture_weighting(graph, h, diam_h)
    tree = shortest_path_tree(
        graph,
        root,
        lambda e: (mixture.scaled(e["length"], e["weight"]), e["length"], 1),
    )
    logger.debug("mixture_tree_built", root=root, h=h, diam_h=mixture.diam_h, vertices=len(tree.parent))
    return tree
