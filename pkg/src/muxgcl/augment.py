"""Stochastic graph views: per-edge dropping and per-column feature masking.

Each training step draws two corrupted views of the input graph. Edge
dropping uses one Bernoulli draw per undirected edge so the corrupted graph
stays symmetric; feature masking zeroes whole columns (the same mask applies
to every node). Degree normalization is recomputed on the corrupted graph.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .datasets import GraphDataset, normalize_adjacency
from .errors import ConfigError


@dataclass(frozen=True)
class AugmentConfig:
    """Per-view corruption probabilities, each in [0, 1)."""

    edge_drop: tuple[float, float] = (0.2, 0.4)
    feature_mask: tuple[float, float] = (0.3, 0.4)

    def __post_init__(self):
        for p in (*self.edge_drop, *self.feature_mask):
            if not (0.0 <= p < 1.0):
                raise ConfigError(f"augmentation probability {p} outside [0, 1)")


@dataclass(frozen=True)
class GraphView:
    """One corrupted view: normalized adjacency plus masked features."""

    adjacency: sp.csr_matrix
    features: np.ndarray


def drop_edges(g: GraphDataset, p: float, rng: np.random.Generator) -> sp.csr_matrix:
    """Remove each undirected edge independently with probability ``p``.

    Returns the corrupted (un-normalized) symmetric adjacency.
    """
    if not (0.0 <= p < 1.0):
        raise ConfigError(f"edge drop probability {p} outside [0, 1)")
    upper = sp.triu(g.adjacency, k=1).tocoo()
    keep = rng.random(upper.nnz) >= p
    u, v = upper.row[keep], upper.col[keep]
    n = g.num_nodes
    if u.size == 0:
        return sp.csr_matrix((n, n))
    rows = np.concatenate([u, v])
    cols = np.concatenate([v, u])
    a = sp.coo_matrix((np.ones(rows.size), (rows, cols)), shape=(n, n)).tocsr()
    a.sort_indices()
    return a


def mask_features(x: np.ndarray, p: float, rng: np.random.Generator) -> np.ndarray:
    """Zero each feature column independently with probability ``p``."""
    if not (0.0 <= p < 1.0):
        raise ConfigError(f"feature mask probability {p} outside [0, 1)")
    keep = (rng.random(x.shape[1]) >= p).astype(x.dtype)
    return x * keep[np.newaxis, :]


def make_views(
    g: GraphDataset, cfg: AugmentConfig, rng: np.random.Generator
) -> tuple[GraphView, GraphView]:
    """Draw both corrupted views from one generator stream.

    Draw order is fixed (view-1 edges, view-1 mask, view-2 edges, view-2
    mask) so a seeded generator reproduces the pair exactly.
    """
    views = []
    for p_edge, p_mask in zip(cfg.edge_drop, cfg.feature_mask):
        adj = drop_edges(g, p_edge, rng)
        feats = mask_features(g.features, p_mask, rng)
        views.append(GraphView(adjacency=normalize_adjacency(adj), features=feats))
    return views[0], views[1]
