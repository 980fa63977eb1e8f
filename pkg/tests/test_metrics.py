import itertools
import math

import networkx as nx
import pytest

from lcmst.algorithms.metrics import (
    lc_diameter,
    lc_distance,
    lc_distance_table,
    mixture_sp_tree,
    mixture_weighting,
)
from lcmst.core.exceptions import InfiniteDiameterError
from lcmst.harness.audit import audit_mixture_paths

from conftest import grid_graph, weighted_graph


@pytest.fixture
def two_routes():
    # direct edge (l=10, w=1) against a two-edge path of total (l=2, w=5)
    return weighted_graph([(0, 1, 10, 1), (0, 2, 1, 2), (2, 1, 1, 3)])


@pytest.mark.parametrize("h, expected", [(1, math.inf), (2, 5), (5, 5), (9, 5), (10, 1), (50, 1)])
def test_lc_distance_prefers_light_path_once_affordable(two_routes, h, expected):
    assert lc_distance(two_routes, 0, 1, h) == expected


def test_lc_distance_to_self_is_zero(two_routes):
    assert lc_distance(two_routes, 2, 2, 0) == 0


def test_lc_distance_disconnected_is_infinite():
    graph = weighted_graph([(0, 1, 1, 1), (2, 3, 1, 1)])
    assert lc_distance(graph, 0, 3, 100) == math.inf


def test_table_is_monotone_in_budget(two_routes):
    table = lc_distance_table(two_routes, 0, 12)
    for v in two_routes.nodes:
        values = [table.at(v, b) for b in range(13)]
        assert values == sorted(values, reverse=True)
    assert table.at(0, 0) == 0


def test_zero_length_edges_are_closed_within_a_budget():
    graph = weighted_graph([(0, 1, 0, 2), (1, 2, 0, 3), (2, 3, 1, 1)])
    table = lc_distance_table(graph, 0, 1)
    assert table.row(0) == {0: 0, 1: 2, 2: 5, 3: math.inf}
    assert table.at(3) == 6


@pytest.mark.parametrize("length, expected", [(1, 7), (2, math.inf)])
def test_single_edge_diameter(length, expected):
    graph = weighted_graph([(0, 1, length, 7)])
    assert lc_diameter(graph, 1) == expected


def test_diameter_of_single_vertex_is_zero():
    graph = nx.Graph()
    graph.add_node(0)
    assert lc_diameter(graph, 0) == 0


def test_diameter_shrinks_as_h_grows(two_routes):
    assert lc_diameter(two_routes, 10) <= lc_diameter(two_routes, 2)


def test_mixture_weighting_needs_finite_diameter():
    graph = weighted_graph([(0, 1, 3, 1)])
    with pytest.raises(InfiniteDiameterError):
        mixture_weighting(graph, 1)


def test_zero_lengths_give_weight_shortest_paths():
    graph = weighted_graph([(0, 1, 0, 4), (0, 2, 0, 1), (2, 1, 0, 1), (1, 3, 0, 2)])
    tree = mixture_sp_tree(graph, 1, 0)
    assert tree.root_distances(graph, "weight") == nx.single_source_dijkstra_path_length(graph, 0, weight="weight")


def test_zero_weights_give_length_shortest_paths():
    graph = grid_graph(3, 3, length=1, weight=0)
    tree = mixture_sp_tree(graph, 4, 0)
    assert tree.root_distances(graph, "length") == nx.single_source_shortest_path_length(graph, 0)


def test_mixture_tree_root_paths_are_bounded(gadget):
    assert audit_mixture_paths(gadget.to_graph(), gadget.h, gadget.root) == []


def test_grid_mixture_tree_root_paths_are_bounded():
    graph = grid_graph(4, 4)
    assert audit_mixture_paths(graph, 6, 0) == []


def test_gadget_has_no_single_tree_of_h_shortest_paths(gadget):
    graph = gadget.to_graph()
    h = gadget.h
    best = {v: lc_distance(graph, gadget.root, v, h) for v in graph.nodes}
    trees = [graph.edge_subgraph(c) for c in itertools.combinations(graph.edges, graph.number_of_nodes() - 1)]
    trees = [t for t in trees if t.number_of_nodes() == graph.number_of_nodes() and nx.is_tree(t)]
    assert len(trees) == 3
    for tree in trees:
        lengths = nx.single_source_dijkstra_path_length(tree, gadget.root, weight="length")
        weights = nx.single_source_dijkstra_path_length(tree, gadget.root, weight="weight")
        assert any(lengths[v] > h or weights[v] != best[v] for v in graph.nodes)
