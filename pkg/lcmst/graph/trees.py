"""Rooted spanning trees and lexicographic shortest-path trees."""
import heapq
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

import networkx as nx

from lcmst.graph.instance import EdgeKey, edge_key

Cost = Tuple[int, ...]


@dataclass(frozen=True)
class SpanningTree:
    """Rooted tree given by parent pointers (``parent[root] is None``)."""

    root: int
    parent: Mapping[int, Optional[int]]
    directed: bool = False

    @property
    def vertices(self) -> List[int]:
        return sorted(self.parent)

    @property
    def edges(self) -> FrozenSet[EdgeKey]:
        return frozenset(
            edge_key(p, v, self.directed) for v, p in self.parent.items() if p is not None
        )

    def contains_edge(self, u: int, v: int) -> bool:
        return self.parent.get(u) == v or self.parent.get(v) == u

    def path_to_root(self, v: int) -> List[int]:
        path = [v]
        while self.parent[path[-1]] is not None:
            path.append(self.parent[path[-1]])
        return path

    def children(self) -> Dict[int, List[int]]:
        kids = {v: [] for v in self.parent}
        for v, p in sorted(self.parent.items()):
            if p is not None:
                kids[p].append(v)
        return kids

    def preorder(self) -> List[int]:
        kids = self.children()
        order, stack = [], [self.root]
        while stack:
            v = stack.pop()
            order.append(v)
            stack.extend(reversed(kids[v]))
        return order

    def root_distances(self, graph: nx.Graph, attr: str = "length") -> Dict[int, int]:
        """Tree-path sums of ``attr`` from the root."""
        dist = {}
        for v in self.preorder():
            p = self.parent[v]
            dist[v] = 0 if p is None else dist[p] + graph[p][v][attr]
        return dist


def shortest_path_tree(
    graph: nx.Graph,
    root: int,
    cost: Callable[[dict], Cost],
) -> SpanningTree:
    """
    Dijkstra over tuple costs compared lexicographically.

    ``cost`` maps edge data to a nonnegative tuple; tuples add componentwise. Ties
    on equal cost go to the smaller parent id. Only vertices reachable from
    ``root`` are included.
    """
    zero = None
    best: Dict[int, Tuple[Cost, int]] = {}
    parent: Dict[int, Optional[int]] = {root: None}
    heap = []
    settled = set()

    heapq.heappush(heap, ((), root))
    best[root] = ((), -1)
    while heap:
        d, u = heapq.heappop(heap)
        if u in settled:
            continue
        settled.add(u)
        neighbors = graph.successors(u) if graph.is_directed() else graph.neighbors(u)
        for v in neighbors:
            if v in settled:
                continue
            c = cost(graph[u][v])
            if zero is None:
                zero = tuple(0 for _ in c)
            nd = tuple(a + b for a, b in zip(d or zero, c))
            current = best.get(v)
            if current is None or (nd, u) < current:
                best[v] = (nd, u)
                parent[v] = u
                heapq.heappush(heap, (nd, v))
    return SpanningTree(root=root, parent=parent, directed=graph.is_directed())


def length_spt(graph: nx.Graph, root: int) -> SpanningTree:
    """Shortest-path tree by length, ties by weight, then hops."""
    return shortest_path_tree(graph, root, lambda e: (e["length"], e["weight"], 1))


def tree_from_edges(edges: Iterable[EdgeKey], root: int, directed: bool = False) -> SpanningTree:
    """Root an acyclic edge set at ``root`` (vertices not connected to it are omitted)."""
    graph = nx.DiGraph() if directed else nx.Graph()
    graph.add_node(root)
    graph.add_edges_from(edges)
    parent = {root: None}
    for u, v in nx.bfs_edges(graph, root):
        parent[v] = u
    return SpanningTree(root=root, parent=parent, directed=directed)


def edge_subgraph(graph: nx.Graph, edges: Iterable[EdgeKey]) -> nx.Graph:
    """Subgraph on the given edges, keeping edge data."""
    sub = nx.DiGraph() if graph.is_directed() else nx.Graph()
    for u, v in edges:
        sub.add_edge(u, v, **graph[u][v])
    return sub


def length_distances(graph: nx.Graph, root: int) -> Dict[int, int]:
    """Length-shortest distances from ``root``; unreachable vertices are absent."""
    if root not in graph:
        return {}
    return nx.single_source_dijkstra_path_length(graph, root, weight="length")
