"""Seeded corpus sweeps; every asserted audit check must hold on every generated instance."""
import math
from functools import lru_cache

import networkx as nx
import pytest

from lcmst.algorithms.assembler import partition_hierarchy, run_main
from lcmst.algorithms.divisions import build_hierarchy
from lcmst.algorithms.lcst import LcstInstance, lcst_approx, lcst_exact, lcst_feasible, levels_for
from lcmst.algorithms.oracle import exact_lcmst
from lcmst.algorithms.separators import lc_separator
from lcmst.api.schemas import (
    Algorithm,
    AuditLevel,
    BudgetKind,
    ExperimentConfig,
    GeneratorKind,
    ProblemKind,
    SolveParams,
)
from lcmst.harness.audit import (
    asserted,
    audit_hierarchy,
    audit_main,
    audit_mixture_paths,
    audit_pieces,
    audit_restriction,
    audit_separator,
)
from lcmst.harness.experiment import run_experiment
from lcmst.harness.generators import generate_instance, small_instance

pytestmark = pytest.mark.slow

PLANAR_SEEDS = range(500)
HIERARCHY_CASES = [
    (generator, size, seed)
    for generator in (GeneratorKind.GRID, GeneratorKind.TRIANGULATED_RANDOM, GeneratorKind.STACKED_TRIANGULATION)
    for size in (12, 20, 30, 42, 60)
    for seed in range(4)
]
ORACLE_CASES = [
    (generator, size, seed)
    for generator, size in (
        (GeneratorKind.TRIANGULATED_RANDOM, 8),
        (GeneratorKind.STACKED_TRIANGULATION, 10),
        (GeneratorKind.GRID, 12),
    )
    for seed in range(20)
]
PARAMS = SolveParams(alpha=2, beta=2, delta=0.5)


@lru_cache(maxsize=None)
def planar_case(seed):
    """Triangulated instance with n <= 200 and h equal to its length diameter."""
    generator = GeneratorKind.TRIANGULATED_RANDOM if seed % 2 else GeneratorKind.STACKED_TRIANGULATION
    instance = generate_instance(ExperimentConfig(generator=generator, size=10 + (seed * 37) % 191), seed)
    graph = instance.to_graph()
    lengths = dict(nx.all_pairs_dijkstra_path_length(graph, weight="length"))
    h = max(max(row.values()) for row in lengths.values())
    return graph, max(h, 1)


@lru_cache(maxsize=None)
def hierarchy_case(generator, size, seed):
    instance = generate_instance(ExperimentConfig(generator=generator, size=size), seed)
    return instance, build_hierarchy(instance.to_graph(), 2, instance.h)


@pytest.mark.parametrize("seed", PLANAR_SEEDS)
def test_separator_is_balanced_short_and_light(seed):
    graph, h = planar_case(seed)
    separator = lc_separator(graph, {v: 1 for v in graph.nodes}, h)
    assert audit_separator(separator, graph) == []


@pytest.mark.parametrize("seed", PLANAR_SEEDS)
def test_mixture_tree_paths_are_short_and_light(seed):
    graph, h = planar_case(seed)
    assert audit_mixture_paths(graph, h, 0) == []


@pytest.mark.parametrize("generator, size, seed", HIERARCHY_CASES)
def test_hierarchy_divisions_and_flattening(generator, size, seed, settings):
    _, hierarchy = hierarchy_case(generator, size, seed)
    violations = audit_hierarchy(hierarchy, settings=settings, full=True)
    assert asserted(violations) == []


@pytest.mark.parametrize("beta", [2, 3, 4])
@pytest.mark.parametrize("generator, size, seed", HIERARCHY_CASES)
def test_pieces_are_few_and_short(generator, size, seed, beta, settings):
    _, hierarchy = hierarchy_case(generator, size, seed)
    assert audit_pieces(partition_hierarchy(hierarchy, beta), beta, settings) == []


@pytest.mark.parametrize("generator, size, seed", ORACLE_CASES)
def test_restricted_optimum_bounds_flattened_diameter(generator, size, seed, settings):
    instance, hierarchy = hierarchy_case(generator, size, seed)
    assert instance.vertex_count <= 12
    opt = exact_lcmst(instance, settings)
    assert opt.feasible
    assert asserted(audit_restriction(hierarchy, opt, settings)) == []


@pytest.mark.parametrize(
    "generator, size, count",
    [
        (GeneratorKind.TRIANGULATED_RANDOM, 7, 70),
        (GeneratorKind.STACKED_TRIANGULATION, 8, 70),
        (GeneratorKind.GRID, 9, 60),
    ],
)
def test_ratio_against_the_oracle(generator, size, count, tmp_path, settings, record_property):
    config = ExperimentConfig(
        generator=generator,
        size=size,
        count=count,
        algorithm=Algorithm.ALL,
        audit=AuditLevel.BASIC,
        budget=BudgetKind.EXACT_OPT,
        params=PARAMS,
        output_dir=str(tmp_path / generator.value),
    )
    result = run_experiment(config, settings)
    assert asserted(result.violations) == []
    ratios = result.summary["ratio_main"].dropna()
    assert not ratios.empty
    record_property("median_ratio_main", float(ratios.median()))
    record_property("median_ratio_lp", float(result.summary["ratio_lp"].dropna().median()))


def test_full_audit_on_small_triangulations(tmp_path, settings):
    config = ExperimentConfig(
        generator=GeneratorKind.TRIANGULATED_RANDOM,
        size=6,
        seed=1000,
        count=12,
        algorithm=Algorithm.ALL,
        audit=AuditLevel.FULL,
        budget=BudgetKind.EXACT_OPT,
        params=PARAMS,
        output_dir=str(tmp_path),
    )
    result = run_experiment(config, settings)
    assert asserted(result.violations) == []
    assert (result.summary["asserted_violations"] == 0).all()


@pytest.mark.parametrize("beta", [3, 4])
@pytest.mark.parametrize("seed", range(15))
def test_main_guarantee_for_larger_beta(seed, beta, settings):
    instance = generate_instance(ExperimentConfig(generator=GeneratorKind.TRIANGULATED_RANDOM, size=6), seed)
    opt = exact_lcmst(instance, settings)
    result = run_main(instance, SolveParams(alpha=2, beta=beta, delta=0.5), opt_weight=opt.weight, settings=settings)
    assert len(result.tree.parent) == instance.vertex_count
    assert asserted(audit_main(instance, result, AuditLevel.BASIC, opt, settings)) == []


def _lcst(seed):
    instance = small_instance(ProblemKind.LCST, 6, seed, length_range=(1, 3), weight_range=(1, 9), max_terminals=4)
    return LcstInstance(
        edges=tuple((e.u, e.v, e.length, e.weight) for e in instance.edges),
        root=instance.root,
        terminals=frozenset(instance.terminals),
        h=instance.h,
    )


@pytest.mark.parametrize("seed", range(150))
def test_lcst_approx_within_greedy_ratio(seed):
    instance = _lcst(seed)
    exact = lcst_exact(instance)
    approx = lcst_approx(instance, 0.5)
    if not exact.feasible:
        assert not approx.feasible
        return
    assert approx.feasible
    assert lcst_feasible(instance, approx.edges)
    levels = levels_for(0.5)
    t = len(instance.terminals - {instance.root})
    assert approx.weight <= 2 * levels * t ** (1 / levels) * exact.weight + 1e-9
    if t == 1:
        assert approx.weight == exact.weight
    assert not math.isinf(approx.weight)
