from fractions import Fraction

import pytest

from lcmst.algorithms.divisions import (
    Region,
    boundary_components,
    build_hierarchy,
    division_levels,
    flatten,
    lc_division,
    restriction,
)
from lcmst.core.exceptions import InfeasibleInstanceError
from lcmst.harness.audit import audit_hierarchy, floor_log

from conftest import grid_graph, weighted_graph


def _all_edges(graph):
    return frozenset(tuple(sorted(e)) for e in graph.edges)


@pytest.mark.parametrize("alpha, levels", [(1, 3), (Fraction(3, 2), 3), (2, 6), (3, 9), (Fraction(9, 4), 6)])
def test_division_levels(alpha, levels):
    assert division_levels(alpha) == levels


@pytest.mark.parametrize("base, value, expected", [(2, 1, 0), (2, 8, 3), (2, 9, 3), (Fraction(3, 2), 2, 1)])
def test_floor_log(base, value, expected):
    assert floor_log(base, value) == expected


def test_flatten_without_boundary_keeps_lengths():
    graph = weighted_graph([(0, 1, 3, 2), (1, 2, 4, 5)])
    flat = flatten(graph, Region(region_id=0, edges=_all_edges(graph)))
    assert flat.edges[0, 1]["length"] == 3
    assert flat.edges[1, 2]["weight"] == 5


def test_flatten_zeroes_boundary():
    graph = weighted_graph([(0, 1, 3, 2), (1, 2, 4, 5)])
    region = Region(region_id=0, edges=_all_edges(graph), boundary=frozenset({(0, 1), (1, 2)}))
    flat = flatten(graph, region)
    assert all(d["length"] == 0 and d["weight"] == 0 for _, _, d in flat.edges(data=True))
    assert flat.edges[0, 1]["orig"] == (0, 1)


def test_restriction_of_whole_graph_is_the_tree():
    graph = weighted_graph([(0, 1, 1, 2), (1, 2, 1, 3), (0, 2, 1, 7)])
    region = Region(region_id=0, edges=_all_edges(graph))
    kept, weight = restriction(graph, [(1, 0), (1, 2)], region)
    assert kept == {(0, 1), (1, 2)}
    assert weight == 5


def test_restriction_drops_boundary_edges():
    graph = weighted_graph([(0, 1, 1, 2), (1, 2, 1, 3)])
    region = Region(region_id=0, edges=_all_edges(graph), boundary=_all_edges(graph))
    assert restriction(graph, [(0, 1), (1, 2)], region) == (frozenset(), 0)


def test_single_edge_hierarchy():
    graph = weighted_graph([(0, 1, 1, 1)])
    hierarchy = build_hierarchy(graph, 2, 1)
    assert hierarchy.depth == 1
    assert len(hierarchy.leaves) == 1
    leaf = hierarchy.leaves[0]
    assert leaf.boundary == {(0, 1)}
    assert leaf.parent == 0


def test_hierarchy_rejects_far_vertices():
    graph = weighted_graph([(0, 1, 1, 1), (1, 2, 5, 1)])
    with pytest.raises(InfeasibleInstanceError) as excinfo:
        build_hierarchy(graph, 2, 3)
    assert excinfo.value.vertex == 2


@pytest.mark.parametrize("rows, cols", [(3, 3), (4, 4), (3, 5)])
def test_grid_hierarchy_structure(rows, cols):
    graph = grid_graph(rows, cols)
    h = rows + cols
    hierarchy = build_hierarchy(graph, 2, h)

    assert hierarchy.root.edges == _all_edges(graph)
    for rid, kids in hierarchy.children.items():
        parent = hierarchy.regions[rid]
        if not kids:
            assert not parent.interior_vertices
            continue
        union = frozenset().union(*(hierarchy.regions[k].edges for k in kids))
        assert union == parent.edges
        for k in kids:
            child = hierarchy.regions[k]
            assert child.depth == parent.depth + 1
            assert parent.boundary & child.edges <= child.boundary

    leaf_edges = frozenset().union(*(leaf.edges for leaf in hierarchy.leaves))
    assert leaf_edges == _all_edges(graph)
    structural = {"hierarchy.leaf_coverage", "hierarchy.leaf_interior", "division.union", "division.complete"}
    assert not [v for v in audit_hierarchy(hierarchy) if v.check in structural]


def test_division_children_have_new_boundary():
    graph = grid_graph(4, 4)
    region = Region(region_id=0, edges=_all_edges(graph))
    division = lc_division(graph, region, 2, 12, root=0)
    assert frozenset().union(*(c.edges for c in division.children)) == region.edges
    assert division.separators
    assert all(child.parent == 0 and child.depth == 1 for child in division.children)
    assert all(boundary_components(child) >= 1 for child in division.children)


def test_hierarchy_dump_and_dot():
    graph = grid_graph(3, 3)
    hierarchy = build_hierarchy(graph, 2, 6)
    dump = hierarchy.dump()
    assert len(dump.regions) == len(hierarchy.regions)
    assert dump.regions[0].parent is None
    assert dump.depth == hierarchy.depth
    dot = hierarchy.to_dot()
    assert dot.startswith("digraph hierarchy {")
    assert dot.count("->") == len(hierarchy.regions) - 1


def test_terminal_weights_stop_at_terminal_free_regions():
    graph = grid_graph(3, 3)
    weights = {v: int(v in {8}) for v in graph.nodes}
    hierarchy = build_hierarchy(graph, 2, 6, vertex_weights=weights)
    for leaf in hierarchy.leaves:
        assert 8 not in leaf.interior_vertices
