import networkx as nx
import numpy as np
import pytest

from lcmst.api.schemas import ExperimentConfig, GeneratorKind, ProblemKind
from lcmst.harness.generators import (
    choose_h,
    gadget_fig1_analog,
    generate_corpus,
    generate_instance,
    grid_edges,
    root_eccentricity,
    stacked_edges,
    triangulated_random_edges,
)


@pytest.mark.parametrize("n, vertices, edges", [(9, 9, 12), (10, 9, 12), (12, 12, 17), (1, 1, 0)])
def test_grid_drops_the_remainder(n, vertices, edges):
    count, pairs = grid_edges(n)
    assert count == vertices
    assert len(pairs) == edges


@pytest.mark.parametrize("build", [stacked_edges, triangulated_random_edges])
@pytest.mark.parametrize("n", [4, 8, 15])
def test_triangulations_are_maximal_planar(build, n):
    pairs = build(n, np.random.default_rng(n))
    graph = nx.Graph(pairs)
    assert graph.number_of_nodes() == n
    assert len(pairs) == 3 * n - 6
    assert len(set(pairs)) == len(pairs)
    assert nx.check_planarity(graph)[0]


def test_tiny_triangulations():
    rng = np.random.default_rng(0)
    assert stacked_edges(2, rng) == [(0, 1)]
    assert triangulated_random_edges(3, rng) == [(0, 1), (0, 2), (1, 2)]


@pytest.mark.parametrize("generator", list(GeneratorKind))
def test_same_seed_same_instance(generator):
    config = ExperimentConfig(generator=generator, size=10, seed=3)
    first, second = generate_instance(config), generate_instance(config)
    assert first == second
    assert first.instance_id == second.instance_id


def test_seed_changes_the_draw():
    config = ExperimentConfig(generator=GeneratorKind.GRID, size=9)
    assert generate_instance(config, 1).instance_id != generate_instance(config, 2).instance_id


def test_generated_lengths_stay_in_range(grid_instance):
    assert grid_instance.kind == ProblemKind.LCMST
    assert all(1 <= e.length <= 5 and 1 <= e.weight <= 20 for e in grid_instance.edges)
    ecc = root_eccentricity(grid_instance.vertex_count, grid_instance.edges)
    assert grid_instance.h == choose_h(ecc, 1.2)


@pytest.mark.parametrize("ecc, factor, infeasible, h", [(4, 1.2, False, 5), (4, 1.0, False, 4), (4, 1.2, True, 3), (0, 1.2, False, 1)])
def test_choose_h(ecc, factor, infeasible, h):
    assert choose_h(ecc, factor, infeasible) == h


def test_infeasible_flag_puts_a_vertex_out_of_reach():
    config = ExperimentConfig(generator=GeneratorKind.STACKED_TRIANGULATION, size=8, seed=5, infeasible=True)
    instance = generate_instance(config)
    assert instance.h < root_eccentricity(instance.vertex_count, instance.edges)


def test_adversarial_weights_fall_with_length():
    config = ExperimentConfig(generator=GeneratorKind.GRID, size=16, adversarial=True)
    edges = sorted(generate_instance(config).edges, key=lambda e: e.length)
    assert all(a.weight >= b.weight for a, b in zip(edges, edges[1:]) if a.length < b.length)


@pytest.mark.parametrize("copies", [1, 2, 3])
def test_gadget_shape(copies):
    instance = gadget_fig1_analog(copies)
    assert instance.vertex_count == 3 * copies + 1
    assert len(instance.edges) == 4 * copies
    assert instance.h == 2
    assert gadget_fig1_analog(copies, infeasible=True).h == 1


def test_gadget_size_maps_to_copies():
    config = ExperimentConfig(generator=GeneratorKind.GADGET_FIG1_ANALOG, size=7)
    assert generate_instance(config).vertex_count == 7


def test_gst_gadget_groups():
    config = ExperimentConfig(generator=GeneratorKind.GST_GADGET, size=9, seed=11)
    instance = generate_instance(config)
    assert instance.kind == ProblemKind.GST
    assert instance.h == 1
    assert all(e.length == 0 for e in instance.edges)
    members = [v for g in instance.groups for v in g]
    assert len(members) == len(set(members))
    assert instance.root not in members
    assert all(1 <= len(g) <= 2 for g in instance.groups)
    assert len(instance.groups) <= 3


def test_corpus_uses_consecutive_seeds():
    config = ExperimentConfig(generator=GeneratorKind.GRID, size=9, seed=4, count=3)
    corpus = generate_corpus(config)
    assert [i.instance_id for i in corpus] == [generate_instance(config, s).instance_id for s in (4, 5, 6)]
