"""Graph representation, planar embeddings and instance I/O."""
from .instance import Edge, EdgeKey, Instance, edge_key, make_instance, parse_instance, serialize_instance
from .trees import SpanningTree, length_spt, shortest_path_tree, tree_from_edges
from .embedding import (
    CyclePartition,
    PlanarEmbedding,
    classify_inside_outside,
    embed_planar,
    fundamental_cycle,
    triangulate,
)
from .contraction import ContractedGraph, contract

__all__ = [
    "Edge",
    "EdgeKey",
    "Instance",
    "edge_key",
    "make_instance",
    "parse_instance",
    "serialize_instance",
    "SpanningTree",
    "length_spt",
    "shortest_path_tree",
    "tree_from_edges",
    "CyclePartition",
    "PlanarEmbedding",
    "classify_inside_outside",
    "embed_planar",
    "fundamental_cycle",
    "triangulate",
    "ContractedGraph",
    "contract",
]
