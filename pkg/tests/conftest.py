import logging

import networkx as nx
import pytest
import structlog

from lcmst.api.schemas import ExperimentConfig, GeneratorKind, ProblemKind
from lcmst.core.config import get_settings
from lcmst.graph.instance import make_instance
from lcmst.harness.generators import gadget_fig1_analog, generate_instance


def weighted_graph(edges):
    """nx.Graph from (u, v, length, weight) tuples."""
    graph = nx.Graph()
    for u, v, length, weight in edges:
        graph.add_edge(u, v, length=length, weight=weight)
    return graph


def grid_graph(rows, cols, length=1, weight=1):
    graph = nx.Graph()
    for i in range(rows):
        for j in range(cols):
            v = i * cols + j
            graph.add_node(v)
            if j + 1 < cols:
                graph.add_edge(v, v + 1, length=length, weight=weight)
            if i + 1 < rows:
                graph.add_edge(v, v + cols, length=length, weight=weight)
    return graph


@pytest.fixture(autouse=True, scope="session")
def quiet_logging():
    structlog.configure(wrapper_class=structlog.make_filtering_bound_logger(logging.CRITICAL))


@pytest.fixture
def settings():
    return get_settings()


@pytest.fixture
def triangle():
    """Root 0 with both unit-length edges forced by h = 1."""
    return make_instance(
        ProblemKind.LCMST,
        3,
        [(0, 1, 1, 1), (0, 2, 1, 1), (1, 2, 2, 0)],
        root=0,
        h=1,
    )


@pytest.fixture
def gadget():
    return gadget_fig1_analog(1)


@pytest.fixture
def grid_instance():
    config = ExperimentConfig(generator=GeneratorKind.GRID, size=9, seed=7)
    return generate_instance(config)
