"""Rooted, edge-weighted, edge-lengthed instances and their text format."""
import hashlib
from typing import Dict, FrozenSet, Iterable, NamedTuple, Optional, Sequence, Tuple

import networkx as nx
from pydantic import BaseModel, ConfigDict, PrivateAttr

from lcmst.api.schemas import ProblemKind
from lcmst.utils.validators import ValidationError, is_nonnegative_int, validate_instance

EdgeKey = Tuple[int, int]


class Edge(NamedTuple):
    u: int
    v: int
    length: int
    weight: int

    @property
    def key(self) -> EdgeKey:
        return (self.u, self.v)


def edge_key(u: int, v: int, directed: bool = False) -> EdgeKey:
    """Canonical key of an edge: sorted endpoints unless directed."""
    if directed or u < v:
        return (u, v)
    return (v, u)


class Instance(BaseModel):
    """
    Validated problem instance.

    Build instances with :func:`make_instance` or :func:`parse_instance`; both
    canonicalize edge order and run the invariant checks.
    """

    model_config = ConfigDict(frozen=True)

    kind: ProblemKind
    vertex_count: int
    h: int
    root: int
    edges: Tuple[Edge, ...]
    terminals: Optional[FrozenSet[int]] = None
    groups: Optional[Tuple[FrozenSet[int], ...]] = None

    _edge_map: Dict[EdgeKey, Edge] = PrivateAttr(default_factory=dict)

    def model_post_init(self, __context) -> None:
        self._edge_map.update((e.key, e) for e in self.edges)

    @property
    def directed(self) -> bool:
        return self.kind == ProblemKind.DST

    @property
    def edge_map(self) -> Dict[EdgeKey, Edge]:
        return self._edge_map

    @property
    def instance_id(self) -> str:
        digest = hashlib.sha1(serialize_instance(self).encode("utf-8"))
        return digest.hexdigest()[:12]

    def edge(self, u: int, v: int) -> Edge:
        return self.edge_map[edge_key(u, v, self.directed)]

    def weight_of(self, keys: Iterable[EdgeKey]) -> int:
        return sum(self.edge_map[k].weight for k in keys)

    def to_graph(self) -> nx.Graph:
        """networkx view with ``length`` and ``weight`` edge attributes."""
        graph = nx.DiGraph() if self.directed else nx.Graph()
        graph.add_nodes_from(range(self.vertex_count))
        for e in self.edges:
            graph.add_edge(e.u, e.v, length=e.length, weight=e.weight)
        return graph


def make_instance(
    kind: ProblemKind,
    vertex_count: int,
    edges: Iterable[Sequence[int]],
    root: int,
    h: int,
    terminals: Optional[Iterable[int]] = None,
    groups: Optional[Sequence[Iterable[int]]] = None,
) -> Instance:
    """Canonicalize and validate raw fields into an :class:`Instance`."""
    kind = ProblemKind(kind)
    raw = [tuple(int(x) for x in e) for e in edges]
    terminal_set = None if terminals is None else frozenset(int(t) for t in terminals)
    group_list = None if groups is None else [frozenset(int(v) for v in g) for g in groups]
    validate_instance(kind, vertex_count, raw, root, h, terminal_set, group_list)

    directed = kind == ProblemKind.DST
    canonical = sorted(Edge(*edge_key(u, v, directed), length, weight) for u, v, length, weight in raw)
    if group_list is not None:
        group_list = sorted(group_list, key=lambda g: min(g))
    return Instance(
        kind=kind,
        vertex_count=vertex_count,
        h=h,
        root=root,
        edges=tuple(canonical),
        terminals=terminal_set,
        groups=None if group_list is None else tuple(group_list),
    )


def parse_instance(text: str) -> Instance:
    """Parse the line-oriented instance format."""
    header = None
    edges, terminals, groups = [], [], []

    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        tag, *fields = line.split()
        if tag == "p":
            if header is not None:
                raise ValidationError("duplicate header", line=line_no)
            if len(fields) != 5 or not all(is_nonnegative_int(f) for f in fields[1:]):
                raise ValidationError("header must be 'p <kind> <n> <m> <h> <root>'", line=line_no)
            try:
                kind = ProblemKind(fields[0])
            except ValueError:
                raise ValidationError(f"unknown problem kind '{fields[0]}'", line=line_no)
            header = (kind, *(int(f) for f in fields[1:]))
            continue
        if header is None:
            raise ValidationError("content before header", line=line_no)
        if not all(is_nonnegative_int(f) for f in fields):
            raise ValidationError("fields must be nonnegative integers", line=line_no)
        values = [int(f) for f in fields]
        if tag == "e":
            if len(values) != 4:
                raise ValidationError("edge line must be 'e <u> <v> <length> <weight>'", line=line_no)
            edges.append(values)
        elif tag == "t":
            if len(values) != 1:
                raise ValidationError("terminal line must be 't <v>'", line=line_no)
            terminals.append(values[0])
        elif tag == "g":
            if not values:
                raise ValidationError("group line needs at least one vertex", line=line_no)
            groups.append(values)
        else:
            raise ValidationError(f"unknown line tag '{tag}'", line=line_no)

    if header is None:
        raise ValidationError("missing header")
    kind, n, m, h, root = header
    if len(edges) != m:
        raise ValidationError(f"header declares {m} edges, found {len(edges)}")

    uses_terminals = kind in (ProblemKind.LCST, ProblemKind.DST)
    if terminals and not uses_terminals:
        raise ValidationError(f"terminals are not allowed for {kind.value}")
    if groups and kind != ProblemKind.GST:
        raise ValidationError(f"groups are not allowed for {kind.value}")
    return make_instance(
        kind,
        n,
        edges,
        root,
        h,
        terminals=terminals if uses_terminals else None,
        groups=groups if kind == ProblemKind.GST else None,
    )


def serialize_instance(instance: Instance) -> str:
    """Canonical text form; ``parse_instance`` of it gives back an equal instance."""
    lines = [
        f"p {instance.kind.value} {instance.vertex_count} {len(instance.edges)} "
        f"{instance.h} {instance.root}"
    ]
    lines.extend(f"e {e.u} {e.v} {e.length} {e.weight}" for e in instance.edges)
    if instance.terminals is not None:
        lines.extend(f"t {t}" for t in sorted(instance.terminals))
    if instance.groups is not None:
        lines.extend("g " + " ".join(str(v) for v in sorted(g)) for g in instance.groups)
    return "\n".join(lines) + "\n"
