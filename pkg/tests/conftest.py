import numpy as np
import pytest

from muxgcl.datasets import GraphDataset, graph_from_edges


def build_graph(num_nodes, edges, num_features=2, num_classes=2, seed=0,
                features=None, labels=None, name="test"):
    """Small helper: random features/labels unless given explicitly."""
    rng = np.random.default_rng(seed)
    if features is None:
        features = rng.normal(size=(num_nodes, num_features))
    if labels is None:
        labels = rng.integers(0, num_classes, size=num_nodes)
        labels[: min(num_classes, num_nodes)] = np.arange(
            min(num_classes, num_nodes)
        )
    return graph_from_edges(num_nodes, edges, features, labels, num_classes, name)


@pytest.fixture
def triangle() -> GraphDataset:
    return build_graph(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def two_path() -> GraphDataset:
    return build_graph(2, [(0, 1)])


@pytest.fixture
def two_cliques() -> GraphDataset:
    """Two disconnected 10-cliques; nodes 0-9 vs 10-19."""
    edges = [(i, j) for i in range(10) for j in range(i + 1, 10)]
    edges += [(i, j) for i in range(10, 20) for j in range(i + 1, 20)]
    labels = np.repeat([0, 1], 10)
    return build_graph(20, edges, num_classes=2, labels=labels)


def random_graph(num_nodes, edge_prob, num_features, seed, num_classes=2):
    rng = np.random.default_rng(seed)
    edges = [
        (i, j)
        for i in range(num_nodes)
        for j in range(i + 1, num_nodes)
        if rng.random() < edge_prob
    ]
    return build_graph(
        num_nodes, edges, num_features=num_features, num_classes=num_classes,
        seed=seed + 1,
    )
