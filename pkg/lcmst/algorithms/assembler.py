"""
Main bicriteria algorithm: guessed piece distances, auxiliary Steiner instances and the
bottom-up dynamic program over a division hierarchy.
"""
import itertools
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterator, List, Mapping, Optional, Sequence, Tuple

import networkx as nx

from lcmst.algorithms.divisions import Hierarchy, Region, build_hierarchy
from lcmst.algorithms.lcst import LcstInstance, lcst_approx
from lcmst.algorithms.pieces import partition_region_boundary
from lcmst.api.schemas import ParameterPreset, ProblemKind, SolveParams, SolveReport
from lcmst.core.config import Settings, get_settings
from lcmst.core.exceptions import GuessBudgetExceededError, InfeasibleInstanceError
from lcmst.core.logger import get_logger
from lcmst.graph.instance import EdgeKey, Instance
from lcmst.graph.trees import SpanningTree, edge_subgraph, length_distances, length_spt

logger = get_logger(__name__)

Pieces = Tuple[FrozenSet[int], ...]


@dataclass(frozen=True)
class ResolvedParams:
    alpha: Fraction
    beta: Fraction
    delta: float
    preset: ParameterPreset

    def as_dict(self) -> Dict[str, float]:
        return {"alpha": float(self.alpha), "beta": float(self.beta), "delta": self.delta, "preset": self.preset.value}


def resolve_parameters(n: int, params: SolveParams, settings: Optional[Settings] = None) -> ResolvedParams:
    """Fill (alpha, beta, delta) from the preset and clamp to alpha in [alpha_min, n], beta in [beta_min, beta_max]."""
    settings = settings or get_settings()
    log_n = math.log2(max(n, 2))
    epsilon = params.epsilon if params.epsilon is not None else 1.0
    alpha, beta = settings.default_alpha, settings.default_beta
    if params.preset == ParameterPreset.EPSILON:
        xi = epsilon / 2
        alpha = log_n ** xi
        beta = log_n / (xi * xi * max(math.log2(log_n), 1.0))
    elif params.preset == ParameterPreset.QUASI_POLY:
        alpha, beta = 2.0, log_n ** 2
    elif params.preset == ParameterPreset.LP:
        alpha, beta = 1.5, log_n / epsilon
    if params.alpha is not None:
        alpha = params.alpha
    if params.beta is not None:
        beta = params.beta

    alpha = min(max(alpha, settings.alpha_min), max(n, settings.alpha_min))
    beta = min(max(beta, settings.beta_min), settings.beta_max)
    delta = params.delta if params.delta is not None else settings.default_delta
    return ResolvedParams(
        alpha=Fraction(alpha).limit_denominator(8),
        beta=Fraction(beta).limit_denominator(8),
        delta=delta,
        preset=params.preset,
    )


@dataclass(frozen=True)
class Scaling:
    """Lengths multiplied by ``factor`` so that h, h/beta and h + h/beta are integers."""

    factor: int
    h: int
    step: int
    beta: Fraction

    @property
    def lcst_budget(self) -> int:
        return self.h + self.step


def make_scaling(h: int, beta) -> Scaling:
    beta = Fraction(beta)
    return Scaling(factor=beta.numerator, h=h * beta.numerator, step=h * beta.denominator, beta=beta)


@dataclass(frozen=True, order=True)
class Guess:
    """Per-piece distance guesses; ``used`` is empty outside the Steiner variant."""

    values: Tuple[Fraction, ...]
    used: Tuple[bool, ...] = ()

    def is_used(self, index: int) -> bool:
        return not self.used or self.used[index]


def guess_count(pieces: int, beta, steiner_bits: bool = False) -> int:
    return math.ceil(Fraction(beta)) ** pieces * (2 ** pieces if steiner_bits else 1)


def enumerate_guesses(
    pieces: Sequence[FrozenSet[int]],
    beta,
    h,
    steiner_bits: bool = False,
    region_id: int = -1,
    budget: Optional[int] = None,
) -> Iterator[Guess]:
    """Every assignment of values in {i * h / beta : 1 <= i <= ceil(beta)} (capped at h), optionally with usage bits."""
    beta = Fraction(beta)
    budget = get_settings().max_guesses_per_region if budget is None else budget
    count = guess_count(len(pieces), beta, steiner_bits)
    if count > budget:
        raise GuessBudgetExceededError(region_id, count, budget)

    grid = sorted({min(Fraction(h) * i / beta, Fraction(h)) for i in range(1, math.ceil(beta) + 1)})
    bit_choices = list(itertools.product((True, False), repeat=len(pieces))) if steiner_bits else [()]
    for values in itertools.product(grid, repeat=len(pieces)):
        for used in bit_choices:
            yield Guess(values=tuple(values), used=tuple(used))


@dataclass(frozen=True)
class FGraph:
    """Auxiliary Steiner instance; ``origin[i]`` is the region edge behind LCST edge i (None for X, X', root link)."""

    instance: LcstInstance
    origin: Tuple[Optional[EdgeKey], ...]
    fake_root: int
    piece_terminals: Tuple[Optional[int], ...]
    zeroed: FrozenSet[EdgeKey]

    def projection(self, edge_ids) -> FrozenSet[EdgeKey]:
        """LCST*: region edges of a solution that carry weight in the region."""
        keys = (self.origin[i] for i in edge_ids)
        return frozenset(k for k in keys if k is not None and k not in self.zeroed)


def build_F(
    graph: nx.Graph,
    parent: Region,
    parent_pieces: Pieces,
    child: Region,
    child_pieces: Pieces,
    g: Guess,
    g_child: Guess,
    scaling: Scaling,
    root: int,
) -> FGraph:
    """
    F(H, H', g, g'): region edges (boundary edges weightless), X edges from the fake
    root to parent pieces of length g, X' edges from each child piece to its terminal
    copy of length h - g'. The top region uses r itself as root and has no X edges.
    """
    if len(g.values) != len(parent_pieces) or len(g_child.values) != len(child_pieces):
        raise ValueError("guess arity does not match the piece lists")
    top = parent.parent is None and not parent.boundary
    zeroed = parent.boundary | child.boundary
    base = max(graph.nodes) + 1

    edges: List[Tuple[int, int, int, int]] = []
    origin: List[Optional[EdgeKey]] = []
    for e in sorted(parent.edges):
        data = graph.edges[e]
        edges.append((e[0], e[1], data["length"] * scaling.factor, 0 if e in zeroed else data["weight"]))
        origin.append(e)

    fake_root = root if top else base
    if not top:
        for i, piece in enumerate(parent_pieces):
            if not g.is_used(i):
                continue
            for v in sorted(piece):
                edges.append((fake_root, v, int(g.values[i]), 0))
                origin.append(None)
        if root in parent.vertices and root not in parent.boundary_vertices:
            edges.append((fake_root, root, 0, 0))
            origin.append(None)

    terminals: List[Optional[int]] = []
    for i, piece in enumerate(child_pieces):
        if not g_child.is_used(i):
            terminals.append(None)
            continue
        t = base + 1 + i
        terminals.append(t)
        for v in sorted(piece):
            edges.append((t, v, scaling.h - int(g_child.values[i]), 0))
            origin.append(None)

    targets = frozenset(t for t in terminals if t is not None)
    instance = LcstInstance(
        edges=tuple(edges),
        root=fake_root,
        terminals=targets,
        h=scaling.lcst_budget,
        sinks=targets,
    )
    return FGraph(
        instance=instance,
        origin=tuple(origin),
        fake_root=fake_root,
        piece_terminals=tuple(terminals),
        zeroed=zeroed,
    )


def f_weight_violations(f: FGraph) -> List[str]:
    """Edges outside E(H) minus the boundaries that carry weight."""
    bad = []
    for (u, v, _, weight), key in zip(f.instance.edges, f.origin):
        if weight and (key is None or key in f.zeroed):
            bad.append(f"{u}-{v}")
    return bad


@dataclass(frozen=True)
class DPCell:
    weight: float
    edges: FrozenSet[EdgeKey]
    choices: Tuple[Tuple[int, Guess, float], ...] = ()


@dataclass
class DPTable:
    """Cells per (region, guess) plus evaluation counters."""

    cells: Dict[int, Dict[Guess, DPCell]]
    scaling: Scaling
    guesses: Dict[int, List[Guess]] = field(default_factory=dict)
    guesses_evaluated: int = 0
    guesses_pruned: int = 0
    children_skipped: int = 0
    lcst_calls: int = 0

    def best(self, region_id: int) -> Tuple[Guess, DPCell]:
        return min(self.cells[region_id].items(), key=lambda item: (item[1].weight, item[0]))


def region_pieces(graph: nx.Graph, region: Region, beta, h: int, root: int) -> Pieces:
    if region.parent is None and not region.boundary:
        return (frozenset({root}),)
    pieces, _ = partition_region_boundary(graph, region.boundary, beta, h)
    return pieces


def partition_hierarchy(hierarchy: Hierarchy, beta) -> Hierarchy:
    graph, h, root = hierarchy.graph, hierarchy.h, hierarchy.root_vertex
    pieces = {rid: region_pieces(graph, region, beta, h, root) for rid, region in hierarchy.regions.items()}
    return hierarchy.with_pieces(pieces)


def _region_guesses(
    region: Region,
    pieces: Pieces,
    scaling: Scaling,
    lower: Mapping[int, int],
    terminals: Optional[FrozenSet[int]],
    settings: Settings,
    table: DPTable,
) -> List[Guess]:
    if region.parent is None and not region.boundary:
        return [Guess(values=(Fraction(0),), used=(True,) if terminals is not None else ())]
    kept = []
    bounds = [min(lower[v] for v in piece) * scaling.factor for piece in pieces]
    forced = [terminals is not None and bool(piece & terminals) for piece in pieces]
    smallest = Fraction(min(scaling.step, scaling.h))
    for guess in enumerate_guesses(
        pieces,
        scaling.beta,
        scaling.h,
        steiner_bits=terminals is not None,
        region_id=region.region_id,
        budget=settings.max_guesses_per_region,
    ):
        ok = True
        for i, value in enumerate(guess.values):
            if guess.is_used(i):
                ok = value >= bounds[i]
            else:
                ok = not forced[i] and value == smallest
            if not ok:
                break
        if ok:
            kept.append(guess)
        else:
            table.guesses_pruned += 1
    return kept


def solve_dp(
    hierarchy: Hierarchy,
    beta,
    delta: float,
    terminals: Optional[FrozenSet[int]] = None,
    settings: Optional[Settings] = None,
) -> DPTable:
    """
    Bottom-up evaluation of DP[H, g] = sum over children H' of
    min over g' of DP[H', g'] + w(LCST*(F(H, H', g, g'))). Leaves are 0.

    ``terminals`` switches on the Steiner variant (usage bits per piece).
    """
    settings = settings or get_settings()
    if not hierarchy.pieces:
        hierarchy = partition_hierarchy(hierarchy, beta)
    graph, root = hierarchy.graph, hierarchy.root_vertex
    scaling = make_scaling(hierarchy.h, beta)
    lower = length_distances(graph, root)
    table = DPTable(cells={}, scaling=scaling)
    ranked: Dict[int, List[Tuple[float, Guess]]] = {}

    for region in hierarchy.regions.values():
        table.guesses[region.region_id] = _region_guesses(
            region, hierarchy.pieces[region.region_id], scaling, lower, terminals, settings, table
        )

    for region in hierarchy.bottom_up():
        rid = region.region_id
        children = hierarchy.children[rid]
        cells: Dict[Guess, DPCell] = {}
        for g in table.guesses[rid]:
            table.guesses_evaluated += 1
            if not children:
                cells[g] = DPCell(weight=0, edges=frozenset())
                continue
            total, edges, choices = 0, set(), []
            for cid in children:
                child = hierarchy.regions[cid]
                best = None
                for below_weight, g_child in ranked[cid]:
                    if best is not None and (below_weight, g_child) > best[0]:
                        table.children_skipped += 1
                        break
                    below = table.cells[cid][g_child]
                    f = build_F(
                        graph, region, hierarchy.pieces[rid], child, hierarchy.pieces[cid], g, g_child, scaling, root
                    )
                    table.lcst_calls += 1
                    result = lcst_approx(f.instance, delta, settings.layer_cap)
                    if not result.feasible:
                        continue
                    projected = f.projection(result.edges)
                    step_weight = sum(graph.edges[e]["weight"] for e in projected)
                    key = (below.weight + step_weight, g_child)
                    if best is None or key < best[0]:
                        best = (key, g_child, step_weight, below.edges | projected)
                if best is None:
                    total = math.inf
                    break
                (cost, _), g_child, step_weight, child_edges = best
                total += cost
                edges |= child_edges
                choices.append((cid, g_child, step_weight))
            if total == math.inf:
                cells[g] = DPCell(weight=math.inf, edges=frozenset())
            else:
                cells[g] = DPCell(weight=total, edges=frozenset(edges), choices=tuple(choices))
        table.cells[rid] = cells
        # children cost at least their own cell, so ranking by it lets parents stop early
        ranked[rid] = sorted((c.weight, g) for g, c in cells.items() if c.weight != math.inf)

    logger.debug(
        "dp_solved",
        regions=len(table.cells),
        guesses_evaluated=table.guesses_evaluated,
        guesses_pruned=table.guesses_pruned,
        children_skipped=table.children_skipped,
        lcst_calls=table.lcst_calls,
    )
    return table


def prune_steiner_leaves(tree: SpanningTree, terminals: FrozenSet[int]) -> SpanningTree:
    """Drop non-terminal leaves until every leaf is a terminal (or the root)."""
    parent = dict(tree.parent)
    degree: Dict[int, int] = {v: 0 for v in parent}
    for v, p in parent.items():
        if p is not None:
            degree[p] += 1
    stack = [v for v, d in degree.items() if d == 0 and v not in terminals and v != tree.root]
    while stack:
        v = stack.pop()
        p = parent.pop(v)
        degree[p] -= 1
        if degree[p] == 0 and p not in terminals and p != tree.root:
            stack.append(p)
    return SpanningTree(root=tree.root, parent=parent)


@dataclass(frozen=True)
class MainResult:
    tree: SpanningTree
    report: SolveReport
    hierarchy: Hierarchy
    table: DPTable


def steiner_terminals(instance: Instance, params: SolveParams) -> Optional[FrozenSet[int]]:
    if instance.kind == ProblemKind.LCST or params.steiner:
        return frozenset(instance.terminals or ()) - {instance.root}
    return None


def length_bound(h: int, depth: int, beta) -> Fraction:
    """h * (1 + 2 depth / beta)."""
    return h * (1 + Fraction(2 * depth) / Fraction(beta))


def run_main(
    instance: Instance,
    params: Optional[SolveParams] = None,
    opt_weight: Optional[int] = None,
    settings: Optional[Settings] = None,
) -> MainResult:
    """
    Divide with 2h-length regions, partition boundaries into pieces, run the guess DP,
    then return the length shortest-path tree of all boundaries plus the best DP edges.
    """
    started = time.perf_counter()
    settings = settings or get_settings()
    params = params or SolveParams()
    resolved = resolve_parameters(instance.vertex_count, params, settings)
    graph = instance.to_graph()
    root, h = instance.root, instance.h
    terminals = steiner_terminals(instance, params)

    weights = None
    if terminals is not None:
        weights = {v: int(v in terminals) for v in graph.nodes}
    hierarchy = build_hierarchy(graph, resolved.alpha, h, weights, root=root)
    hierarchy = partition_hierarchy(hierarchy, resolved.beta)
    table = solve_dp(hierarchy, resolved.beta, resolved.delta, terminals, settings)

    _, top = table.best(hierarchy.root.region_id)
    if top.weight == math.inf:
        raise InfeasibleInstanceError("no guess assignment admits a feasible Steiner instance")

    bought = hierarchy.boundary_union() | top.edges
    sub = edge_subgraph(graph, bought)
    sub.add_node(root)
    tree = length_spt(sub, root)
    if terminals is None and len(tree.parent) != graph.number_of_nodes():
        missing = sorted(set(graph.nodes) - set(tree.parent))
        raise InfeasibleInstanceError(f"assembled tree misses {len(missing)} vertices", vertex=missing[0])
    if terminals is not None:
        tree = prune_steiner_leaves(tree, terminals)

    dist = tree.root_distances(graph)
    weight = sum(graph.edges[e]["weight"] for e in tree.edges)
    max_dist = max(dist.values(), default=0)
    bound = length_bound(h, hierarchy.depth, resolved.beta)
    report = SolveReport(
        instance_id=instance.instance_id,
        variant="main" if terminals is None else "main-steiner",
        params=resolved.as_dict(),
        weight=weight,
        opt_weight=opt_weight,
        ratio=ratio(weight, opt_weight),
        max_root_distance=max_dist,
        h=h,
        slack=max_dist / h,
        depth=hierarchy.depth,
        guesses_evaluated=table.guesses_evaluated,
        lcst_calls=table.lcst_calls,
        wall_time_ms=(time.perf_counter() - started) * 1000,
        edges=sorted(tree.edges),
        stats={
            "length_bound": float(bound),
            "regions": len(hierarchy.regions),
            "pieces": sum(len(p) for p in hierarchy.pieces.values()),
            "guesses_pruned": table.guesses_pruned,
            "boundary_weight": sum(graph.edges[e]["weight"] for e in hierarchy.boundary_union()),
            "dp_weight": top.weight,
            "scale": table.scaling.factor,
        },
    )
    logger.info(
        "main_solved",
        instance_id=report.instance_id,
        weight=weight,
        slack=report.slack,
        depth=report.depth,
        lcst_calls=report.lcst_calls,
    )
    return MainResult(tree=tree, report=report, hierarchy=hierarchy, table=table)


def ratio(weight: int, opt_weight: Optional[int]) -> Optional[float]:
    if opt_weight is None:
        return None
    if opt_weight == 0:
        return 1.0 if weight == 0 else math.inf
    return weight / opt_weight
