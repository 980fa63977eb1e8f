"""Vertex-group contraction on scratch copies, with a map back to original edges."""
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set

import networkx as nx

from lcmst.graph.instance import EdgeKey, edge_key


@dataclass(frozen=True)
class ContractedGraph:
    """
    Result of contracting vertex groups.

    Every edge of ``graph`` carries ``orig``, the key of the input edge it came
    from. A parallel edge created by contraction is subdivided by a synthetic
    vertex (listed in ``subdivisions``); both halves share the same ``orig``, the
    second half has length and weight 0. Input edges inside a group become
    self-loops and are listed in ``dropped``.
    """

    graph: nx.Graph
    node_of: Mapping[int, int]
    members: Mapping[int, FrozenSet[int]]
    subdivisions: FrozenSet[int]
    dropped: FrozenSet[EdgeKey]

    def origins(self, edges: Iterable[EdgeKey]) -> Set[EdgeKey]:
        return {self.graph.edges[e]["orig"] for e in edges}

    def expand(self, nodes: Iterable[int]) -> Set[int]:
        """Input vertices represented by contracted nodes (subdivisions expand to nothing)."""
        out = set()
        for x in nodes:
            out |= self.members.get(x, frozenset())
        return out


def contract(
    graph: nx.Graph,
    groups: Sequence[Iterable[int]],
    representatives: Optional[Sequence[int]] = None,
) -> ContractedGraph:
    """Contract each group into one node (its representative, default the smallest member)."""
    node_of: Dict[int, int] = {v: v for v in graph.nodes}
    members: Dict[int, Set[int]] = {v: {v} for v in graph.nodes}
    for index, group in enumerate(groups):
        group = sorted(set(group))
        if not group:
            continue
        rep = representatives[index] if representatives is not None else group[0]
        for v in group:
            members.pop(v, None)
            node_of[v] = rep
        members[rep] = set(group)

    out = nx.Graph()
    out.add_nodes_from(sorted(set(node_of.values())))
    next_id = max(graph.nodes, default=-1) + 1
    subdivisions: List[int] = []
    dropped: Set[EdgeKey] = set()

    for u, v in sorted(edge_key(a, b) for a, b in graph.edges):
        data = graph[u][v]
        orig = data.get("orig", (u, v))
        a, b = node_of[u], node_of[v]
        if a == b:
            dropped.add(orig)
            continue
        if not out.has_edge(a, b):
            out.add_edge(a, b, length=data["length"], weight=data["weight"], orig=orig)
            continue
        s = next_id
        next_id += 1
        subdivisions.append(s)
        out.add_edge(a, s, length=data["length"], weight=data["weight"], orig=orig)
        out.add_edge(s, b, length=0, weight=0, orig=orig)

    return ContractedGraph(
        graph=out,
        node_of=node_of,
        members={x: frozenset(m) for x, m in members.items()},
        subdivisions=frozenset(subdivisions),
        dropped=frozenset(dropped),
    )
