"""Combinatorial planar embeddings: rotation systems, faces, triangulation, cycle sides."""
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx

from lcmst.core.exceptions import CycleError, DisconnectedError, LcmstError, NonPlanarError
from lcmst.core.logger import get_logger
from lcmst.graph.instance import EdgeKey, Instance, edge_key
from lcmst.graph.trees import SpanningTree

logger = get_logger(__name__)

Dart = Tuple[int, int]


@dataclass(frozen=True)
class PlanarEmbedding:
    """
    Rotation system of a connected plane graph.

    ``rotation[v]`` lists the neighbours of ``v`` in cyclic order. The face to the
    left of dart ``(v, w)`` continues with ``(w, successor of v around w)``.
    ``outer_dart`` pins the outer face; triangulation keeps the dart, so the outer
    face of a triangulated embedding is the triangle that contains it.
    """

    rotation: Mapping[int, Tuple[int, ...]]
    outer_dart: Optional[Dart] = None
    synthetic_edges: FrozenSet[EdgeKey] = frozenset()
    synthetic_vertices: FrozenSet[int] = frozenset()
    _position: Dict[int, Dict[int, int]] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        position = {v: {u: i for i, u in enumerate(nbrs)} for v, nbrs in self.rotation.items()}
        object.__setattr__(self, "_position", position)

    @property
    def vertices(self) -> List[int]:
        return sorted(self.rotation)

    @property
    def edges(self) -> List[EdgeKey]:
        return sorted({edge_key(v, u) for v, nbrs in self.rotation.items() for u in nbrs})

    @property
    def real_edges(self) -> List[EdgeKey]:
        return [e for e in self.edges if e not in self.synthetic_edges]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._position.get(u, {})

    def successor(self, v: int, u: int) -> int:
        """Neighbour following ``u`` in the rotation at ``v``."""
        nbrs = self.rotation[v]
        return nbrs[(self._position[v][u] + 1) % len(nbrs)]

    def next_dart(self, dart: Dart) -> Dart:
        v, w = dart
        return (w, self.successor(w, v))

    def faces(self) -> List[Tuple[Dart, ...]]:
        """Faces as dart cycles, enumerated in a deterministic order."""
        seen = set()
        faces = []
        for v in self.vertices:
            for w in self.rotation[v]:
                if (v, w) in seen:
                    continue
                face = []
                dart = (v, w)
                while dart not in seen:
                    seen.add(dart)
                    face.append(dart)
                    dart = self.next_dart(dart)
                faces.append(tuple(face))
        return faces

    def face_index(self) -> Tuple[List[Tuple[Dart, ...]], Dict[Dart, int]]:
        faces = self.faces()
        return faces, {d: i for i, face in enumerate(faces) for d in face}

    def face_count(self) -> int:
        return max(1, len(self.faces()))

    def euler_holds(self) -> bool:
        """V - E + F = 2 for the connected embedded graph."""
        return len(self.rotation) - len(self.edges) + self.face_count() == 2

    def to_graph(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(self.rotation)
        graph.add_edges_from(self.edges)
        return graph


@dataclass(frozen=True)
class CyclePartition:
    """Sides of a simple cycle; edge sides are derived from face sides."""

    cycle_vertices: FrozenSet[int]
    inside: FrozenSet[int]
    outside: FrozenSet[int]
    inside_edges: FrozenSet[EdgeKey] = frozenset()
    outside_edges: FrozenSet[EdgeKey] = frozenset()


def _as_undirected(graph: Union[Instance, nx.Graph]) -> nx.Graph:
    if isinstance(graph, Instance):
        graph = graph.to_graph()
    if graph.is_directed():
        graph = graph.to_undirected(as_view=False)
    return graph


def embed_planar(graph: Union[Instance, nx.Graph]) -> PlanarEmbedding:
    """Planar rotation system of a connected graph, or NonPlanarError with a witness."""
    graph = _as_undirected(graph)
    if graph.number_of_nodes() == 0 or not nx.is_connected(graph):
        raise DisconnectedError("graph must be connected to be embedded")

    is_planar, certificate = nx.check_planarity(graph, counterexample=True)
    if not is_planar:
        witness = [edge_key(u, v) for u, v in certificate.edges()]
        logger.warning("non_planar_graph", witness_edges=len(witness))
        raise NonPlanarError(witness)

    rotation = {v: tuple(certificate.neighbors_cw_order(v)) for v in sorted(graph.nodes)}
    embedding = PlanarEmbedding(rotation=rotation)
    faces = embedding.faces()
    outer = max(faces, key=len)[0] if faces else None
    return PlanarEmbedding(rotation=rotation, outer_dart=outer)


def triangulate(embedding: PlanarEmbedding) -> PlanarEmbedding:
    """
    Add synthetic diagonals until every face is a triangle.

    Diagonals that already exist are never added again; a face-centre vertex is
    added only when no diagonal of a face is available.
    """
    rotation = {v: list(nbrs) for v, nbrs in embedding.rotation.items()}
    if len(rotation) < 3:
        return embedding
    adjacency = {v: set(nbrs) for v, nbrs in rotation.items()}
    synthetic_edges = set(embedding.synthetic_edges)
    synthetic_vertices = set(embedding.synthetic_vertices)
    next_id = max(rotation) + 1

    def insert_after(v: int, anchor: int, new: int) -> None:
        nbrs = rotation[v]
        nbrs.insert(nbrs.index(anchor) + 1, new)
        adjacency[v].add(new)

    for face in embedding.faces():
        corners = [d[0] for d in face]
        while len(corners) > 3:
            k = len(corners)
            for i in range(k):
                a, c = corners[i], corners[(i + 2) % k]
                if a != c and c not in adjacency[a]:
                    p, b = corners[i - 1], corners[(i + 1) % k]
                    insert_after(a, p, c)
                    insert_after(c, b, a)
                    synthetic_edges.add(edge_key(a, c))
                    del corners[(i + 1) % k]
                    break
            else:
                if len(set(corners)) != k:
                    raise LcmstError(f"cannot triangulate face with repeated corners {corners}")
                hub = next_id
                next_id += 1
                rotation[hub] = list(reversed(corners))
                adjacency[hub] = set(corners)
                for i, v in enumerate(corners):
                    insert_after(v, corners[i - 1], hub)
                    synthetic_edges.add(edge_key(v, hub))
                synthetic_vertices.add(hub)
                corners = []

    logger.debug(
        "triangulated",
        synthetic_edges=len(synthetic_edges) - len(embedding.synthetic_edges),
        synthetic_vertices=len(synthetic_vertices) - len(embedding.synthetic_vertices),
    )
    return PlanarEmbedding(
        rotation={v: tuple(nbrs) for v, nbrs in rotation.items()},
        outer_dart=embedding.outer_dart,
        synthetic_edges=frozenset(synthetic_edges),
        synthetic_vertices=frozenset(synthetic_vertices),
    )


def fundamental_cycle(tree: SpanningTree, e: EdgeKey) -> Tuple[List[EdgeKey], List[EdgeKey]]:
    """Tree paths from the endpoints of non-tree edge ``e`` up to their lowest common ancestor."""
    u, v = e
    if tree.parent.get(u) == v or tree.parent.get(v) == u:
        raise CycleError(f"edge {e} is a tree edge")
    if u not in tree.parent or v not in tree.parent:
        raise CycleError(f"edge {e} has an endpoint outside the tree")

    ancestors_u = tree.path_to_root(u)
    on_u_path = set(ancestors_u)
    ancestors_v = []
    for x in tree.path_to_root(v):
        ancestors_v.append(x)
        if x in on_u_path:
            break
    lca = ancestors_v[-1]
    ancestors_u = ancestors_u[: ancestors_u.index(lca) + 1]

    def as_edges(chain: Sequence[int]) -> List[EdgeKey]:
        return [edge_key(a, b) for a, b in zip(chain, chain[1:])]

    return as_edges(ancestors_u), as_edges(ancestors_v)


def _check_simple_cycle(embedding: PlanarEmbedding, cycle: Iterable[EdgeKey]) -> FrozenSet[EdgeKey]:
    edges = frozenset(edge_key(*e) for e in cycle)
    if len(edges) < 3:
        raise CycleError("a simple cycle needs at least 3 edges")
    graph = nx.Graph(list(edges))
    for u, v in edges:
        if not embedding.has_edge(u, v):
            raise CycleError(f"cycle edge {(u, v)} is not embedded")
    if any(d != 2 for _, d in graph.degree()) or not nx.is_connected(graph):
        raise CycleError("edge set is not a simple cycle")
    return edges


def classify_inside_outside(
    embedding: PlanarEmbedding,
    cycle: Iterable[EdgeKey],
    face_index: Optional[Tuple[List[Tuple[Dart, ...]], Dict[Dart, int]]] = None,
) -> CyclePartition:
    """
    Split the vertices and edges off a simple cycle into inside and outside.

    Faces reachable from the outer face without crossing the cycle are outside;
    a vertex or edge takes the side of the faces around it.
    """
    edges = _check_simple_cycle(embedding, cycle)
    cycle_vertices = frozenset(v for e in edges for v in e)
    faces, face_of = face_index if face_index is not None else embedding.face_index()

    outer = face_of[embedding.outer_dart] if embedding.outer_dart is not None else 0
    outside_faces = {outer}
    queue = deque([outer])
    while queue:
        f = queue.popleft()
        for u, v in faces[f]:
            if edge_key(u, v) in edges:
                continue
            g = face_of[(v, u)]
            if g not in outside_faces:
                outside_faces.add(g)
                queue.append(g)

    inside, outside = set(), set()
    for v, nbrs in embedding.rotation.items():
        if v in cycle_vertices or not nbrs:
            continue
        (outside if face_of[(v, nbrs[0])] in outside_faces else inside).add(v)

    inside_edges, outside_edges = set(), set()
    for e in embedding.edges:
        if e in edges:
            continue
        (outside_edges if face_of[e] in outside_faces else inside_edges).add(e)

    return CyclePartition(
        cycle_vertices=cycle_vertices,
        inside=frozenset(inside),
        outside=frozenset(outside),
        inside_edges=frozenset(inside_edges),
        outside_edges=frozenset(outside_edges),
    )
