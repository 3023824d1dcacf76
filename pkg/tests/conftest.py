import numpy as np
import pytest

from netlasso.graphs import Graph, Partition, validate_graph


@pytest.fixture
def path2() -> Graph:
    return validate_graph([(0, 1)], [1.0], 2)


@pytest.fixture
def path4() -> Graph:
    return validate_graph([(0, 1), (1, 2), (2, 3)], [1.0, 1.0, 1.0], 4)


@pytest.fixture
def triangle() -> Graph:
    return validate_graph([(0, 1), (0, 2), (1, 2)], [2.0, 1.0, 1.0], 3)


@pytest.fixture
def two_cluster_fixture():
    """Minimal two-cluster instance: samples m=0, n=3 flank one boundary edge.

    Nodes m=0, i=1, j=2, n=3; edges {0,1} w=4, {1,2} w=1 (the boundary),
    {2,3} w=4; clusters {0,1} and {2,3}.
    """
    g = validate_graph([(0, 1), (1, 2), (2, 3)], [4.0, 1.0, 4.0], 4)
    partition = Partition((frozenset({0, 1}), frozenset({2, 3})))
    samples = (0, 3)
    return g, partition, samples


def random_connected_graph(rng: np.random.Generator, n: int, extra_edge_prob: float = 0.4,
                           w_lo: float = 0.5, w_hi: float = 2.0) -> Graph:
    """Random spanning tree plus extra edges; weights uniform in [w_lo, w_hi]."""
    edges = {}
    for v in range(1, n):
        u = int(rng.integers(0, v))
        edges[(u, v)] = float(rng.uniform(w_lo, w_hi))
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) not in edges and rng.random() < extra_edge_prob:
                edges[(i, j)] = float(rng.uniform(w_lo, w_hi))
    keys = sorted(edges)
    return validate_graph(keys, [edges[e] for e in keys], n)
