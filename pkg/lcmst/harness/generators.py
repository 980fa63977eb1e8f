"""Seeded planar instance families; a seed fully determines the instance."""
import math
from typing import Dict, List, Optional, Sequence, Set, Tuple

import networkx as nx
import numpy as np

from lcmst.api.schemas import ExperimentConfig, GeneratorKind, ProblemKind
from lcmst.core.logger import get_logger
from lcmst.graph.instance import Instance, edge_key, make_instance
from lcmst.graph.trees import length_distances

logger = get_logger(__name__)

Triangle = Tuple[int, int, int]

# (u, v, length, weight) of one gadget copy over local ids r=0, x=1, u=2, v=3
GADGET_EDGES = ((0, 1, 1, 0), (1, 2, 1, 1), (0, 2, 1, 10), (2, 3, 1, 0))
GADGET_H = 2


def grid_edges(n: int) -> Tuple[int, List[Tuple[int, int]]]:
    """Rows = floor(sqrt n) and as many full columns as fit in n vertices."""
    rows = max(1, math.isqrt(n))
    cols = max(1, n // rows)
    edges = []
    for i in range(rows):
        for j in range(cols):
            v = i * cols + j
            if j + 1 < cols:
                edges.append((v, v + 1))
            if i + 1 < rows:
                edges.append((v, v + cols))
    return rows * cols, edges


def _stack(n: int, rng: np.random.Generator) -> Tuple[Set[Tuple[int, int]], List[Triangle]]:
    """Grow a triangulation by inserting each new vertex into a uniformly chosen face."""
    faces: List[Triangle] = [(0, 1, 2), (0, 2, 1)]
    edges = {(0, 1), (0, 2), (1, 2)}
    for v in range(3, n):
        a, b, c = faces.pop(int(rng.integers(len(faces))))
        faces.extend([(a, b, v), (b, c, v), (c, a, v)])
        edges.update(edge_key(v, x) for x in (a, b, c))
    return edges, faces


def stacked_edges(n: int, rng: np.random.Generator) -> List[Tuple[int, int]]:
    if n < 3:
        return [(0, 1)] if n == 2 else []
    edges, _ = _stack(n, rng)
    return sorted(edges)


def _flip(edges: Set[Tuple[int, int]], faces: List[Triangle], rng: np.random.Generator) -> bool:
    owners: Dict[Tuple[int, int], List[int]] = {}
    for i, face in enumerate(faces):
        for k in range(3):
            owners.setdefault(edge_key(face[k], face[(k + 1) % 3]), []).append(i)
    key = sorted(edges)[int(rng.integers(len(edges)))]
    f, g = owners[key]
    a, b = key
    c = next(x for x in faces[f] if x not in key)
    d = next(x for x in faces[g] if x not in key)
    if c == d or edge_key(c, d) in edges:
        return False
    # keep orientation: replace (.., a, b, ..) faces by two faces across c-d
    fa = faces[f]
    i = fa.index(c)
    p, q = fa[(i + 1) % 3], fa[(i + 2) % 3]
    faces[f] = (c, p, d)
    faces[g] = (d, q, c)
    edges.discard(key)
    edges.add(edge_key(c, d))
    return True


def triangulated_random_edges(n: int, rng: np.random.Generator, flips: Optional[int] = None) -> List[Tuple[int, int]]:
    """Stacked triangulation followed by random edge flips."""
    if n < 4:
        return stacked_edges(n, rng)
    edges, faces = _stack(n, rng)
    done = 0
    for _ in range(4 * n if flips is None else flips):
        done += _flip(edges, faces, rng)
    logger.debug("triangulation_flipped", vertices=n, flips=done)
    return sorted(edges)


def _draw(
    pairs: Sequence[Tuple[int, int]],
    rng: np.random.Generator,
    length_range: Tuple[int, int],
    weight_range: Tuple[int, int],
    adversarial: bool,
) -> List[Tuple[int, int, int, int]]:
    lengths = rng.integers(length_range[0], length_range[1] + 1, size=len(pairs))
    if adversarial:
        span = max(1, length_range[1] - length_range[0])
        frac = (lengths - length_range[0]) / span
        weights = np.rint(weight_range[1] - frac * (weight_range[1] - weight_range[0])).astype(np.int64)
    else:
        weights = rng.integers(weight_range[0], weight_range[1] + 1, size=len(pairs))
    return [(u, v, int(l), int(w)) for (u, v), l, w in zip(pairs, lengths, weights)]


def root_eccentricity(vertex_count: int, edges, root: int = 0) -> int:
    graph = nx.Graph()
    graph.add_nodes_from(range(vertex_count))
    graph.add_edges_from((u, v, {"length": l}) for u, v, l, _ in edges)
    dist = length_distances(graph, root)
    return int(max(dist.values(), default=0))


def choose_h(eccentricity: int, h_factor: float, infeasible: bool = False) -> int:
    if infeasible:
        return max(0, eccentricity - 1)
    return max(1, math.ceil(h_factor * eccentricity))


def gadget_fig1_analog(copies: int, infeasible: bool = False) -> Instance:
    """Copies of the gadget sharing the root: h-shortest paths to u and v need different parents at u."""
    edges = []
    for k in range(copies):
        local = {0: 0, 1: 3 * k + 1, 2: 3 * k + 2, 3: 3 * k + 3}
        edges.extend((local[a], local[b], l, w) for a, b, l, w in GADGET_EDGES)
    h = GADGET_H - 1 if infeasible else GADGET_H
    return make_instance(ProblemKind.LCMST, 3 * copies + 1, edges, 0, h)


def gst_gadget(n: int, rng: np.random.Generator, weight_range: Tuple[int, int]) -> Instance:
    """Grid with random disjoint groups of one or two non-root vertices."""
    count, pairs = grid_edges(n)
    raw = _draw(pairs, rng, (0, 0), weight_range, False)
    candidates = [int(v) for v in rng.permutation(np.arange(1, count))]
    groups = []
    while candidates and len(groups) < max(1, count // 3):
        size = min(len(candidates), int(rng.integers(1, 3)))
        groups.append(candidates[:size])
        candidates = candidates[size:]
    return make_instance(ProblemKind.GST, count, raw, 0, 1, groups=groups)


def small_instance(
    kind: ProblemKind,
    n: int,
    seed: int,
    length_range: Tuple[int, int] = (0, 2),
    weight_range: Tuple[int, int] = (0, 5),
    max_terminals: int = 3,
) -> Instance:
    """
    Oracle-sized instance of any problem kind on a stacked triangulation.

    Lengths may be 0. The length bound is drawn around the root eccentricity, so
    some LCMST and LCST draws are infeasible. DST arcs get one random orientation
    each; GST groups are disjoint sets of one or two non-root vertices.
    """
    kind = ProblemKind(kind)
    rng = np.random.default_rng(seed)
    n = max(2, n)
    pairs = stacked_edges(n, rng)
    lengths = (0, 0) if kind in (ProblemKind.DST, ProblemKind.GST) else length_range
    edges = _draw(pairs, rng, lengths, weight_range, False)
    others = [int(v) for v in rng.permutation(np.arange(1, n))]
    picked = others[: int(rng.integers(1, min(max_terminals, n - 1) + 1))]

    if kind == ProblemKind.DST:
        arcs = [(v, u, l, w) if rng.random() < 0.5 else (u, v, l, w) for u, v, l, w in edges]
        return make_instance(kind, n, arcs, 0, 0, terminals=picked)
    if kind == ProblemKind.GST:
        groups, rest = [], list(picked) + [v for v in others if v not in picked]
        while rest and len(groups) < len(picked):
            size = min(len(rest), int(rng.integers(1, 3)))
            groups.append(rest[:size])
            rest = rest[size:]
        return make_instance(kind, n, edges, 0, 1, groups=groups)

    ecc = root_eccentricity(n, edges)
    h = max(0, math.ceil(float(rng.uniform(0.7, 1.5)) * ecc))
    if kind == ProblemKind.LCST:
        return make_instance(kind, n, edges, 0, h, terminals=picked)
    return make_instance(kind, n, edges, 0, h)


def generate_instance(config: ExperimentConfig, seed: Optional[int] = None) -> Instance:
    """Instance of ``config.generator`` drawn with ``numpy.random.default_rng(seed)``."""
    seed = config.seed if seed is None else seed
    rng = np.random.default_rng(seed)
    kind = config.generator
    n = config.size

    if kind == GeneratorKind.GADGET_FIG1_ANALOG:
        return gadget_fig1_analog(max(1, (n - 1) // 3), config.infeasible)
    if kind == GeneratorKind.GST_GADGET:
        return gst_gadget(n, rng, config.weight_range)

    if kind == GeneratorKind.GRID:
        count, pairs = grid_edges(n)
    elif kind == GeneratorKind.STACKED_TRIANGULATION:
        count, pairs = max(n, 1), stacked_edges(n, rng)
    else:
        count, pairs = max(n, 1), triangulated_random_edges(n, rng)

    edges = _draw(pairs, rng, config.length_range, config.weight_range, config.adversarial)
    ecc = root_eccentricity(count, edges)
    h = choose_h(ecc, config.h_factor, config.infeasible)
    instance = make_instance(ProblemKind.LCMST, count, edges, 0, h)
    logger.debug("instance_generated", generator=kind.value, seed=seed, vertices=count, h=h)
    return instance


def generate_corpus(config: ExperimentConfig) -> List[Instance]:
    return [generate_instance(config, config.seed + i) for i in range(config.count)]
