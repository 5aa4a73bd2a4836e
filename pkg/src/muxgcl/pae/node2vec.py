"""Second-order biased random walks with skip-gram negative sampling.

Walks follow the classic return/in-out bias scheme: stepping from ``cur``
with predecessor ``prev``, a candidate next node x carries weight 1/p if
x == prev, 1 if x neighbors prev, and 1/q otherwise. Sampling uses
vectorized rejection against the maximum weight, which reduces to plain
uniform neighbor sampling when p == q == 1.

The skip-gram model is trained by SGD over (center, context) pairs inside a
per-position reduced window, using unigram^0.75 negative sampling and a
linearly decaying learning rate. Everything is numpy; scatter updates go
through a sparse matmul so large batches stay fast.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..datasets import GraphDataset
from ..errors import ConfigError


@dataclass(frozen=True)
class Node2VecConfig:
    dim: int = 128
    walks_per_node: int = 10
    walk_length: int = 80
    window: int = 10
    p: float = 1.0
    q: float = 1.0
    negatives: int = 5
    epochs: int = 5
    initial_lr: float = 0.025
    final_lr: float = 1e-4
    batch_pairs: int = 16384

    def __post_init__(self):
        if self.dim < 2:
            raise ConfigError("embedding dim must be >= 2")
        if self.p <= 0 or self.q <= 0:
            raise ConfigError("walk biases p and q must be positive")


def _uniform_neighbor(indptr, indices, cur, rng):
    deg = indptr[cur + 1] - indptr[cur]
    offsets = (rng.random(cur.shape[0]) * deg).astype(np.int64)
    return indices[indptr[cur] + offsets]


def simulate_walks(
    g: GraphDataset, cfg: Node2VecConfig, rng: np.random.Generator
) -> np.ndarray:
    """Generate all walks at once; dead ends are padded with -1."""
    n = g.num_nodes
    indptr = g.adjacency.indptr.astype(np.int64)
    indices = g.adjacency.indices.astype(np.int64)
    degrees = np.diff(indptr)
    # Sorted directed-edge keys for O(log E) neighbor membership tests.
    rows = np.repeat(np.arange(n, dtype=np.int64), degrees)
    edge_keys = rows * n + indices

    starts = np.tile(np.arange(n, dtype=np.int64), cfg.walks_per_node)
    rng.shuffle(starts)
    walks = np.full((starts.shape[0], cfg.walk_length), -1, dtype=np.int64)
    walks[:, 0] = starts

    first_order = cfg.p == 1.0 and cfg.q == 1.0
    w_max = max(1.0 / cfg.p, 1.0, 1.0 / cfg.q)

    alive = degrees[starts] > 0
    for t in range(1, cfg.walk_length):
        active = np.flatnonzero(alive)
        if active.size == 0:
            break
        cur = walks[active, t - 1]
        if t == 1 or first_order:
            nxt = _uniform_neighbor(indptr, indices, cur, rng)
        else:
            prev = walks[active, t - 2]
            nxt = _biased_step(indptr, indices, edge_keys, n, cur, prev, w_max,
                               cfg.p, cfg.q, rng)
        walks[active, t] = nxt
        alive[active] = degrees[nxt] > 0
    return walks


def _biased_step(indptr, indices, edge_keys, n, cur, prev, w_max, p, q, rng):
    """One rejection-sampled second-order step for all active walkers."""
    nxt = np.empty(cur.shape[0], dtype=np.int64)
    pending = np.arange(cur.shape[0])
    for _ in range(64):
        cand = _uniform_neighbor(indptr, indices, cur[pending], rng)
        w = np.full(cand.shape[0], 1.0 / q)
        w[cand == prev[pending]] = 1.0 / p
        keys = prev[pending] * n + cand
        pos = np.searchsorted(edge_keys, keys)
        pos = np.minimum(pos, edge_keys.shape[0] - 1)
        w[edge_keys[pos] == keys] = 1.0
        accept = rng.random(cand.shape[0]) * w_max <= w
        nxt[pending[accept]] = cand[accept]
        pending = pending[~accept]
        if pending.size == 0:
            break
    else:
        # Pathological p/q: fall back to the last proposals.
        nxt[pending] = _uniform_neighbor(indptr, indices, cur[pending], rng)
    return nxt


def _skipgram_pairs(walks: np.ndarray, window: int, rng: np.random.Generator):
    """Centers/contexts for a per-position reduced window (word2vec style)."""
    valid = walks >= 0
    span = rng.integers(1, window + 1, size=walks.shape)
    centers, contexts = [], []
    for d in range(1, window + 1):
        left, right = walks[:, :-d], walks[:, d:]
        ok = valid[:, :-d] & valid[:, d:]
        fwd = ok & (span[:, :-d] >= d)
        bwd = ok & (span[:, d:] >= d)
        centers.append(left[fwd])
        contexts.append(right[fwd])
        centers.append(right[bwd])
        contexts.append(left[bwd])
    return np.concatenate(centers), np.concatenate(contexts)


def _scatter_add(table: np.ndarray, idx: np.ndarray, updates: np.ndarray) -> None:
    """table[idx] += updates with duplicate indices summed."""
    b = idx.shape[0]
    sel = sp.coo_matrix(
        (np.ones(b, dtype=table.dtype), (idx, np.arange(b))),
        shape=(table.shape[0], b),
    )
    table += sel @ updates


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def node2vec_embed(
    g: GraphDataset, cfg: Node2VecConfig, seed: int
) -> np.ndarray:
    """Train node embeddings from biased walks; returns the center table."""
    rng = np.random.default_rng(seed)
    n = g.num_nodes
    walks = simulate_walks(g, cfg, rng)

    counts = np.bincount(walks[walks >= 0], minlength=n).astype(np.float64)
    noise = counts**0.75
    if noise.sum() == 0.0:
        noise = np.ones(n)
    noise_cdf = np.cumsum(noise / noise.sum())

    # float32 tables: SGD batches are memory-bound and need no more precision.
    emb_in = rng.uniform(-0.5 / cfg.dim, 0.5 / cfg.dim,
                         size=(n, cfg.dim)).astype(np.float32)
    emb_out = np.zeros((n, cfg.dim), dtype=np.float32)

    total = 0
    epochs_pairs = []
    for _ in range(cfg.epochs):
        c, o = _skipgram_pairs(walks, cfg.window, rng)
        perm = rng.permutation(c.shape[0])
        epochs_pairs.append((c[perm], o[perm]))
        total += c.shape[0]

    processed = 0
    for c, o in epochs_pairs:
        for lo in range(0, c.shape[0], cfg.batch_pairs):
            hi = min(lo + cfg.batch_pairs, c.shape[0])
            frac = processed / max(total, 1)
            lr = max(cfg.final_lr, cfg.initial_lr * (1.0 - frac))
            _sgns_batch(emb_in, emb_out, c[lo:hi], o[lo:hi], noise_cdf,
                        cfg.negatives, lr, rng)
            processed += hi - lo
    return emb_in.astype(np.float64)


def _sgns_batch(emb_in, emb_out, centers, contexts, noise_cdf, k_neg, lr, rng):
    b = centers.shape[0]
    if b == 0:
        return
    negs = np.searchsorted(noise_cdf, rng.random((b, k_neg)))
    targets = np.concatenate([contexts[:, None], negs], axis=1)
    labels = np.zeros((b, k_neg + 1), dtype=emb_in.dtype)
    labels[:, 0] = 1.0

    h = emb_in[centers]
    t_vecs = emb_out[targets]
    scores = np.einsum("bd,bkd->bk", h, t_vecs)
    grad = (labels - _sigmoid(scores)) * emb_in.dtype.type(lr)
    dh = np.einsum("bk,bkd->bd", grad, t_vecs)
    dt = grad[:, :, None] * h[:, None, :]
    _scatter_add(emb_out, targets.ravel(), dt.reshape(-1, emb_out.shape[1]))
    _scatter_add(emb_in, centers, dh)
