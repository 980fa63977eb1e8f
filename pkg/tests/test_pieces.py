from fractions import Fraction

import networkx as nx
import pytest

from lcmst.algorithms.assembler import partition_hierarchy
from lcmst.algorithms.divisions import build_hierarchy
from lcmst.algorithms.pieces import induced_diameter, partition_boundary, partition_region_boundary
from lcmst.core.exceptions import PieceBudgetError
from lcmst.harness.audit import audit_pieces

from conftest import grid_graph, weighted_graph


def test_long_spoke_is_cut_off():
    star = weighted_graph([(0, 1, 1, 0), (0, 2, 1, 0), (0, 3, 10, 0)])
    partition = partition_boundary(star, 1)
    assert partition.pieces == (frozenset({0, 1, 2}), frozenset({3}))
    assert partition.long_edge_cuts == 1
    assert partition.diameters == (2, 0)


def test_single_vertex_is_one_piece():
    graph = nx.Graph()
    graph.add_node(5)
    partition = partition_boundary(graph, 2)
    assert partition.pieces == (frozenset({5}),)
    assert partition.count == 1


def test_component_longer_than_budget_is_rejected():
    path = weighted_graph([(0, 1, 3, 0), (1, 2, 3, 0)])
    with pytest.raises(PieceBudgetError):
        partition_boundary(path, 1, budget=5)


@pytest.mark.parametrize("beta", [1, 2, 3, Fraction(5, 2)])
def test_path_pieces_respect_diameter_and_count(beta):
    path = weighted_graph([(i, i + 1, 1, 0) for i in range(12)])
    partition = partition_boundary(path, beta)
    assert partition.vertices == frozenset(range(13))
    assert sum(len(p) for p in partition.pieces) == 13
    assert all(d * Fraction(beta) <= partition.budget for d in partition.diameters)
    assert partition.count <= 8 * Fraction(beta)
    for piece in partition.pieces:
        assert nx.is_connected(path.subgraph(piece))


def test_induced_diameter_uses_lengths():
    path = weighted_graph([(0, 1, 2, 9), (1, 2, 3, 9)])
    assert induced_diameter(path, {0, 1, 2}) == 5
    with pytest.raises(ValueError):
        induced_diameter(path, {0, 2})


def test_region_boundary_pieces_use_h_over_beta():
    graph = weighted_graph([(i, i + 1, 1, 1) for i in range(9)])
    boundary = [(i, i + 1) for i in range(9)]
    pieces, partitions = partition_region_boundary(graph, boundary, 3, 6)
    assert len(partitions) == 1
    assert frozenset().union(*pieces) == frozenset(range(10))
    for piece in pieces:
        assert induced_diameter(graph, piece) * 3 <= 6


def test_hierarchy_pieces_pass_audit():
    graph = grid_graph(4, 4)
    hierarchy = partition_hierarchy(build_hierarchy(graph, 2, 8), 2)
    structural = {"pieces.disjoint", "pieces.cover", "pieces.component", "pieces.diameter"}
    assert not [v for v in audit_pieces(hierarchy, 2) if v.check in structural]
