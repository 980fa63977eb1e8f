"""Subset dynamic program for minimum-weight Steiner arborescences and group Steiner trees."""
import heapq
from dataclasses import dataclass
from typing import FrozenSet, Hashable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from lcmst.core.logger import get_logger

logger = get_logger(__name__)

Arc = Tuple[Hashable, Hashable]
INF = np.inf


@dataclass(frozen=True)
class SteinerSolution:
    weight: int
    arcs: FrozenSet[Arc]
    states: int


def _relax(dp_row: np.ndarray, hop: np.ndarray, reverse_adj: List[List[Tuple[int, int]]]) -> None:
    """dp[v] = min(dp[v], w(v, u) + dp[u]) to a fixpoint; ``hop[v]`` records u on improvement."""
    heap = [(dp_row[i], i) for i in np.flatnonzero(np.isfinite(dp_row))]
    heapq.heapify(heap)
    while heap:
        d, u = heapq.heappop(heap)
        if d > dp_row[u]:
            continue
        for v, w in reverse_adj[u]:
            nd = d + w
            if nd < dp_row[v]:
                dp_row[v] = nd
                hop[v] = u
                heapq.heappush(heap, (nd, v))


def steiner_arborescence(
    graph: nx.Graph,
    root: Hashable,
    terminal_groups: Sequence[FrozenSet[Hashable]],
    weight: str = "weight",
) -> Optional[SteinerSolution]:
    """
    Minimum-weight subgraph connecting ``root`` to at least one node of every group.

    Directed graphs are solved as arborescences out of ``root``; undirected graphs use
    both arc directions. Plain Steiner terminals are singleton groups. Returns None
    when some group is unreachable.
    """
    nodes = sorted(graph.nodes, key=repr)
    index = {v: i for i, v in enumerate(nodes)}
    n, k = len(nodes), len(terminal_groups)
    if root not in index:
        return None
    if k == 0:
        return SteinerSolution(weight=0, arcs=frozenset(), states=0)

    reverse_adj: List[List[Tuple[int, int]]] = [[] for _ in nodes]
    arcs = graph.edges(data=True)
    for u, v, data in arcs:
        reverse_adj[index[v]].append((index[u], data[weight]))
        if not graph.is_directed():
            reverse_adj[index[u]].append((index[v], data[weight]))

    full = (1 << k) - 1
    dp = np.full((full + 1, n), INF)
    hop = np.full((full + 1, n), -1, dtype=np.int64)
    split = np.full((full + 1, n), 0, dtype=np.int64)

    for bit, group in enumerate(terminal_groups):
        mask = 1 << bit
        for t in group:
            if t in index:
                dp[mask, index[t]] = 0
        _relax(dp[mask], hop[mask], reverse_adj)

    for mask in range(1, full + 1):
        if mask & (mask - 1) == 0:
            continue
        low = mask & -mask
        sub = (mask - 1) & mask
        while sub:
            if sub & low:
                other = mask ^ sub
                if other:
                    total = dp[sub] + dp[other]
                    better = total < dp[mask]
                    dp[mask][better] = total[better]
                    split[mask][better] = sub
            sub = (sub - 1) & mask
        _relax(dp[mask], hop[mask], reverse_adj)

    best = dp[full, index[root]]
    if not np.isfinite(best):
        return None

    chosen = set()
    stack = [(full, index[root])]
    while stack:
        mask, v = stack.pop()
        u = hop[mask, v]
        if u >= 0:
            chosen.add((nodes[v], nodes[u]))
            stack.append((mask, u))
        elif split[mask, v]:
            sub = int(split[mask, v])
            stack.append((sub, v))
            stack.append((mask ^ sub, v))

    logger.debug("steiner_dp_solved", nodes=n, groups=k, weight=int(best))
    return SteinerSolution(weight=int(best), arcs=frozenset(chosen), states=(full + 1) * n)
