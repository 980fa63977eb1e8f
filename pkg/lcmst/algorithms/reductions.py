"""
Instance transformers between the four problem kinds, with solution mappers.

Every bundle maps solutions both ways: ``forward`` takes a source solution to a
target solution, ``backward`` takes a target solution back to the source. Solutions
are edge-key sets; DST solutions use directed ``(tail, head)`` keys.
"""
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx

from lcmst.algorithms.lcst import LcstInstance, layer
from lcmst.algorithms.oracle import solve_exact
from lcmst.api.schemas import ProblemKind
from lcmst.core.config import Settings, get_settings
from lcmst.core.exceptions import ReductionError
from lcmst.core.logger import get_logger
from lcmst.graph.instance import EdgeKey, Instance, edge_key, make_instance
from lcmst.graph.trees import edge_subgraph, length_spt, tree_from_edges

logger = get_logger(__name__)

Solution = FrozenSet[EdgeKey]
Mapper = Callable[[Iterable[EdgeKey]], Solution]


@dataclass(frozen=True)
class ReductionBundle:
    name: str
    source: Instance
    target: Instance
    forward: Mapper = field(repr=False)
    backward: Mapper = field(repr=False)
    vertex_table: Dict[int, str] = field(default_factory=dict, repr=False)
    edge_table: Dict[EdgeKey, Optional[EdgeKey]] = field(default_factory=dict, repr=False)
    source_opt: Optional[int] = None
    target_opt: Optional[int] = None

    def sidecar(self) -> dict:
        """Correspondence tables in a JSON-ready shape."""
        return {
            "reduction": self.name,
            "source_id": self.source.instance_id,
            "target_id": self.target.instance_id,
            "source_opt": self.source_opt,
            "target_opt": self.target_opt,
            "vertices": {str(v): label for v, label in sorted(self.vertex_table.items())},
            "edges": [
                {"target": list(key), "source": None if origin is None else list(origin)}
                for key, origin in sorted(self.edge_table.items())
            ],
        }


def _require(instance: Instance, kind: ProblemKind) -> None:
    if instance.kind != kind:
        raise ReductionError(f"expected a {kind.value} instance, got {instance.kind.value}")


def _original_edges(edge_table: Dict[EdgeKey, Optional[EdgeKey]], edges: Iterable[EdgeKey]) -> Solution:
    return frozenset(edge_table[k] for k in edges if edge_table.get(k) is not None)


def _spanning_edges(
    root: int, vertex_count: int, existing: Set[EdgeKey], vertices: Iterable[int], h: int
) -> Tuple[List[Tuple[int, int, int, int]], int]:
    """Root edges of length h and weight 0; a helper vertex stands in where the edge already exists."""
    added = []
    next_id = vertex_count
    for v in sorted(vertices):
        if v == root:
            continue
        if edge_key(root, v) in existing:
            added.append((root, next_id, h, 0))
            added.append((next_id, v, 0, 0))
            next_id += 1
        else:
            added.append((root, v, h, 0))
    return added, next_id


def _spt_mapper(target: Instance, fixed: Sequence[EdgeKey]) -> Mapper:
    """Union with the fixed zero-weight edges, then keep a length-shortest-path tree."""
    graph = target.to_graph()

    def forward(edges: Iterable[EdgeKey]) -> Solution:
        keys = {edge_key(*e) for e in edges} | set(fixed)
        sub = edge_subgraph(graph, keys)
        sub.add_node(target.root)
        return length_spt(sub, target.root).edges

    return forward


def _zero_length_bridges(instance: Instance, non_terminals: Set[int], terminals: Set[int]) -> bool:
    """True when some zero-length component holds both a non-terminal and a terminal."""
    graph = nx.Graph()
    graph.add_edges_from((e.u, e.v) for e in instance.edges if e.length == 0)
    return any(c & non_terminals and c & terminals for c in nx.connected_components(graph))


def lcst_to_lcmst(instance: Instance) -> ReductionBundle:
    """
    Span the non-terminals with root edges of length h and weight 0.

    A root edge followed by zero-length edges would reach a terminal for free, so
    when a zero-length component joins a non-terminal to a terminal the lengths
    are doubled, root edges get length 2h+1 and every terminal carries a pendant
    of length 1. The bound becomes 2h+1, which holds the terminals to 2h and keeps
    every path through a root edge away from them.
    """
    _require(instance, ProblemKind.LCST)
    n, r, h = instance.vertex_count, instance.root, instance.h
    terminals = set(instance.terminals or ()) - {r}
    non_terminals = set(range(n)) - terminals - {r}
    guarded = bool(non_terminals) and _zero_length_bridges(instance, non_terminals, terminals)

    scale, bound = (2, 2 * h + 1) if guarded else (1, h)
    raw = [(e.u, e.v, scale * e.length, e.weight) for e in instance.edges]
    helpers, count = _spanning_edges(r, n, set(instance.edge_map), non_terminals, bound)
    pendants = []
    if guarded:
        for t in sorted(terminals):
            pendants.append((t, count, 1, 0))
            count += 1
    target = make_instance(ProblemKind.LCMST, count, raw + helpers + pendants, r, bound)

    edge_table: Dict[EdgeKey, Optional[EdgeKey]] = {e.key: e.key for e in instance.edges}
    fixed = [edge_key(u, v) for u, v, _, _ in helpers + pendants]
    edge_table.update((k, None) for k in fixed)
    vertex_table = {v: f"vertex {v}" for v in range(n)}
    vertex_table.update((v, "helper") for v in range(n, count - len(pendants)))
    vertex_table.update((p, f"pendant {t}") for t, p, _, _ in pendants)

    logger.debug("lcst_to_lcmst", spanning_edges=len(helpers), pendants=len(pendants), guarded=guarded)
    return ReductionBundle(
        name="lcst->lcmst",
        source=instance,
        target=target,
        forward=_spt_mapper(target, fixed),
        backward=lambda edges: _original_edges(edge_table, edges),
        vertex_table=vertex_table,
        edge_table=edge_table,
    )


def lcmst_to_dst(instance: Instance, layer_cap: Optional[int] = None) -> ReductionBundle:
    """Layered digraph with copies (v, 0..h); the terminals are the layer-h copies."""
    _require(instance, ProblemKind.LCMST)
    r, h = instance.root, instance.h
    lcst = LcstInstance(
        edges=tuple((e.u, e.v, e.length, e.weight) for e in instance.edges),
        root=r,
        terminals=frozenset(range(instance.vertex_count)) - {r},
        h=h,
    )
    layered = layer(lcst, layer_cap)

    rank = {v: i for i, v in enumerate(sorted(set(range(instance.vertex_count)) - {r}))}

    def node_id(v: int, i: int) -> int:
        return 0 if v == r else 1 + rank[v] * (h + 1) + i

    arcs, arc_table = [], {}
    for (a, i), (b, j), data in layered.graph.edges(data=True):
        tail, head = node_id(a, i), node_id(b, j)
        arcs.append((tail, head, j - i, data["weight"]))
        idx = data["edge"]
        arc_table[(tail, head)] = None if idx is None else edge_key(*lcst.edges[idx][:2])

    count = 1 + len(rank) * (h + 1)
    terminals = [node_id(t, h) for t in layered.terminals]
    target = make_instance(ProblemKind.DST, count, arcs, 0, h, terminals=terminals)
    source_graph = instance.to_graph()

    def backward(edges: Iterable[EdgeKey]) -> Solution:
        keys = _original_edges(arc_table, edges)
        sub = edge_subgraph(source_graph, keys)
        sub.add_node(r)
        return length_spt(sub, r).edges

    def forward(edges: Iterable[EdgeKey]) -> Solution:
        tree = tree_from_edges(edges, r)
        depth = tree.root_distances(source_graph, "length")
        out = set()
        for v, p in tree.parent.items():
            if p is None:
                continue
            out.add((node_id(p, depth[p]), node_id(v, depth[v])))
            out.update((node_id(v, i), node_id(v, i + 1)) for i in range(depth[v], h))
        return frozenset(out)

    vertex_table = {node_id(v, i): f"({v},{i})" for v, i in layered.graph.nodes}
    logger.debug("lcmst_to_dst", layers=h + 1, vertices=count, arcs=len(arcs))
    return ReductionBundle(
        name="lcmst->dst",
        source=instance,
        target=target,
        forward=forward,
        backward=backward,
        vertex_table=vertex_table,
        edge_table=arc_table,
    )


def dst_to_lcst(instance: Instance) -> ReductionBundle:
    """
    Undirected layered graph over n layers with length bound n.

    Arc u->v becomes the edges (u_i, v_i+1) of length 1. Each terminal gets a
    special copy per layer, joined to its layer-i copy by an edge of length n-i,
    and the special copies of one terminal form a zero clique.
    """
    _require(instance, ProblemKind.DST)
    n, r = instance.vertex_count, instance.root
    terminals = sorted(set(instance.terminals or ()) - {r})
    index = {t: k for k, t in enumerate(terminals)}

    def copy(v: int, i: int) -> int:
        return i * n + v

    def special(t: int, i: int) -> int:
        return n * n + index[t] * n + i

    edges, edge_table = [], {}
    for e in instance.edges:
        for i in range(n - 1):
            key = edge_key(copy(e.u, i), copy(e.v, i + 1))
            edges.append((*key, 1, e.weight))
            edge_table[key] = e.key
    for t in terminals:
        for i in range(n):
            edges.append((copy(t, i), special(t, i), n - i, 0))
            edge_table[edge_key(copy(t, i), special(t, i))] = None
            for j in range(i + 1, n):
                edges.append((special(t, i), special(t, j), 0, 0))
                edge_table[(special(t, i), special(t, j))] = None

    count = n * n + len(terminals) * n
    target = make_instance(
        ProblemKind.LCST,
        count,
        edges,
        copy(r, 0),
        n,
        terminals=[special(t, i) for t in terminals for i in range(n)],
    )

    def forward(arcs: Iterable[EdgeKey]) -> Solution:
        tree = tree_from_edges(arcs, r, directed=True)
        depth = {r: 0}
        for v in tree.preorder():
            if tree.parent[v] is not None:
                depth[v] = depth[tree.parent[v]] + 1
        out = set()
        for v, p in tree.parent.items():
            if p is not None:
                out.add(edge_key(copy(p, depth[p]), copy(v, depth[v])))
        for t in terminals:
            if t not in depth:
                continue
            d = depth[t]
            out.add(edge_key(copy(t, d), special(t, d)))
            out.update(edge_key(special(t, d), special(t, j)) for j in range(n) if j != d)
        return frozenset(out)

    vertex_table = {copy(v, i): f"({v},{i})" for v in range(n) for i in range(n)}
    vertex_table.update((special(t, i), f"({t},{i})*") for t in terminals for i in range(n))
    logger.debug("dst_to_lcst", layers=n, vertices=count, edges=len(edges))
    return ReductionBundle(
        name="dst->lcst",
        source=instance,
        target=target,
        forward=forward,
        backward=lambda edges: _original_edges(edge_table, edges),
        vertex_table=vertex_table,
        edge_table=edge_table,
    )


def gst_to_lcmst(instance: Instance, h: int = 1) -> ReductionBundle:
    """
    Length-constrained MST gadget for a group Steiner tree instance.

    Original edges keep their weight with length 0; every group vertex is pulled
    away by a copy at length h, copies of one group share a zero clique, and every
    vertex is spanned from the root by an edge of length h and weight 0.
    """
    _require(instance, ProblemKind.GST)
    groups = [sorted(g) for g in instance.groups or ()]
    members = [v for g in groups for v in g]
    if len(members) != len(set(members)):
        raise ReductionError("groups overlap; run normalize_groups first")

    n, r = instance.vertex_count, instance.root
    copy_of = {v: n + k for k, v in enumerate(members)}
    edges = [(e.u, e.v, 0, e.weight) for e in instance.edges]
    fixed = [(v, c, h, 0) for v, c in copy_of.items()]
    for g in groups:
        copies = [copy_of[v] for v in g]
        fixed.extend((a, b, 0, 0) for i, a in enumerate(copies) for b in copies[i + 1 :])
    spanning, count = _spanning_edges(r, n + len(members), set(instance.edge_map), range(n), h)
    fixed.extend(spanning)
    target = make_instance(ProblemKind.LCMST, count, edges + fixed, r, h)

    edge_table: Dict[EdgeKey, Optional[EdgeKey]] = {e.key: e.key for e in instance.edges}
    fixed_keys = [edge_key(u, v) for u, v, _, _ in fixed]
    edge_table.update((k, None) for k in fixed_keys)
    vertex_table = {v: f"vertex {v}" for v in range(n)}
    vertex_table.update((c, f"copy {v}") for v, c in copy_of.items())
    vertex_table.update((v, "helper") for v in range(n + len(members), count))

    logger.debug("gst_to_lcmst", groups=len(groups), copies=len(members), vertices=count, h=h)
    return ReductionBundle(
        name="gst->lcmst",
        source=instance,
        target=target,
        forward=_spt_mapper(target, fixed_keys),
        backward=lambda tree: _original_edges(edge_table, tree),
        vertex_table=vertex_table,
        edge_table=edge_table,
    )


def normalize_groups(
    vertex_count: int,
    edges: Sequence[Sequence[int]],
    groups: Sequence[Iterable[int]],
) -> Tuple[int, List[Tuple[int, int, int, int]], List[List[int]]]:
    """
    Make raw groups disjoint.

    A vertex shared by several groups is replaced in each of them by its own
    pendant copy, joined to it by an edge of length 0 and weight 0.
    """
    raw_groups = [sorted(set(g)) for g in groups]
    seen: Dict[int, int] = {}
    for g in raw_groups:
        for v in g:
            seen[v] = seen.get(v, 0) + 1
    shared = {v for v, k in seen.items() if k > 1}

    out_edges = [tuple(int(x) for x in e) for e in edges]
    out_groups = []
    next_id = vertex_count
    for g in raw_groups:
        members = []
        for v in g:
            if v in shared:
                out_edges.append((v, next_id, 0, 0))
                members.append(next_id)
                next_id += 1
            else:
                members.append(v)
        out_groups.append(members)
    if shared:
        logger.info("groups_normalized", shared_vertices=len(shared), pendant_copies=next_id - vertex_count)
    return next_id, out_edges, out_groups


REDUCTIONS: Dict[Tuple[ProblemKind, ProblemKind], Callable[..., ReductionBundle]] = {
    (ProblemKind.LCST, ProblemKind.LCMST): lcst_to_lcmst,
    (ProblemKind.LCMST, ProblemKind.DST): lcmst_to_dst,
    (ProblemKind.DST, ProblemKind.LCST): dst_to_lcst,
    (ProblemKind.GST, ProblemKind.LCMST): gst_to_lcmst,
}


def reduce_instance(instance: Instance, target: ProblemKind, **options) -> ReductionBundle:
    try:
        reduction = REDUCTIONS[(instance.kind, ProblemKind(target))]
    except KeyError:
        raise ReductionError(f"no reduction from {instance.kind.value} to {ProblemKind(target).value}")
    return reduction(instance, **options)


def certify(bundle: ReductionBundle, settings: Optional[Settings] = None) -> ReductionBundle:
    """Fill in both exact optima; raises TooLargeError when either side is beyond the oracle."""
    settings = settings or get_settings()
    source = solve_exact(bundle.source, settings)
    target = solve_exact(bundle.target, settings)
    logger.info("reduction_certified", reduction=bundle.name, source_opt=source.weight, target_opt=target.weight)
    return replace(bundle, source_opt=source.weight, target_opt=target.weight)
