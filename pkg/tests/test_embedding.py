import networkx as nx
import pytest

from lcmst.core.exceptions import CycleError, DisconnectedError, NonPlanarError
from lcmst.graph.contraction import contract
from lcmst.graph.embedding import classify_inside_outside, embed_planar, fundamental_cycle, triangulate
from lcmst.graph.trees import SpanningTree

from conftest import grid_graph, weighted_graph


def test_k4_has_four_faces():
    embedding = embed_planar(nx.complete_graph(4))
    assert embedding.face_count() == 4
    assert embedding.euler_holds()


def test_k5_is_rejected_with_witness():
    with pytest.raises(NonPlanarError) as excinfo:
        embed_planar(nx.complete_graph(5))
    assert len(excinfo.value.witness) >= 9


def test_disconnected_graph_is_rejected():
    graph = nx.Graph([(0, 1), (2, 3)])
    with pytest.raises(DisconnectedError):
        embed_planar(graph)


def test_triangulated_k4_is_unchanged():
    embedding = triangulate(embed_planar(nx.complete_graph(4)))
    assert not embedding.synthetic_edges
    assert not embedding.synthetic_vertices


@pytest.mark.parametrize("n", [4, 5, 6])
def test_cycle_triangulation(n):
    embedding = triangulate(embed_planar(nx.cycle_graph(n)))
    assert all(len(face) == 3 for face in embedding.faces())
    assert embedding.euler_holds()
    assert not embedding.synthetic_vertices
    assert len(embedding.edges) == 3 * n - 6
    assert len(embedding.real_edges) == n


def test_triangulation_keeps_outer_dart():
    base = embed_planar(grid_graph(3, 3))
    embedding = triangulate(base)
    assert embedding.outer_dart == base.outer_dart
    assert all(len(face) == 3 for face in embedding.faces())


def test_fundamental_cycle_of_path():
    tree = SpanningTree(root=0, parent={0: None, 1: 0, 2: 1})
    p1, p2 = fundamental_cycle(tree, (0, 2))
    assert set(p1) | set(p2) == {(0, 1), (1, 2)}


def test_fundamental_cycle_rejects_tree_edge():
    tree = SpanningTree(root=0, parent={0: None, 1: 0, 2: 1})
    with pytest.raises(CycleError):
        fundamental_cycle(tree, (1, 2))


def test_inner_ring_of_grid_encloses_centre():
    graph = grid_graph(5, 5)
    ring = [6, 7, 8, 13, 18, 17, 16, 11]
    cycle = [tuple(sorted((a, b))) for a, b in zip(ring, ring[1:] + ring[:1])]
    partition = classify_inside_outside(embed_planar(graph), cycle)
    assert partition.inside == {12}
    assert partition.cycle_vertices == set(ring)
    assert partition.outside == set(graph.nodes) - {12} - set(ring)
    assert partition.inside_edges == {(7, 12), (11, 12), (12, 13), (12, 17)}


def test_partition_sides_never_share_an_edge():
    graph = grid_graph(4, 4)
    ring = [0, 1, 2, 6, 5, 4]
    cycle = [tuple(sorted((a, b))) for a, b in zip(ring, ring[1:] + ring[:1])]
    partition = classify_inside_outside(embed_planar(graph), cycle)
    for u, v in graph.edges:
        assert not (u in partition.inside and v in partition.outside)
        assert not (u in partition.outside and v in partition.inside)


def test_non_cycle_edge_set_is_rejected():
    embedding = embed_planar(grid_graph(3, 3))
    with pytest.raises(CycleError):
        classify_inside_outside(embedding, [(0, 1), (1, 2), (2, 5)])


def test_contraction_subdivides_parallel_edges():
    graph = weighted_graph([(0, 1, 1, 1), (0, 2, 2, 2), (1, 3, 1, 1), (2, 3, 1, 1)])
    contracted = contract(graph, [[1, 2]])
    assert contracted.node_of[2] == 1
    assert len(contracted.subdivisions) == 2
    assert contracted.graph.number_of_edges() == 6
    assert contracted.origins(contracted.graph.edges) == {(0, 1), (0, 2), (1, 3), (2, 3)}
    assert contracted.expand([1]) == {1, 2}
