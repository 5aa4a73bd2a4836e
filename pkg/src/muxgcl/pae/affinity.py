"""Pooled patch embeddings and the soft-negative weight table.

Given per-node topology embeddings, each node's hop-k patch embedding is the
L2-normalized mean over its k-hop ego-net. The weight for a negative pair
(anchor i at the final hop, candidate j at hop k) is

    omega = max(floor, 1 - clamp(<h_i_final, h_j_k>, 0, 1))

so topologically overlapping patches are down-weighted. The floor keeps
every weight strictly positive. Weights can be fully precomputed (one dense
float32 matrix per hop) or produced row-by-row from the patch embeddings;
both paths share one kernel and return identical values.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from ..datasets import GraphDataset
from ..errors import ConfigError, DataError

_CACHE_MAGIC = b"MGPH"
_CACHE_VERSION = 1
BACKEND_IDS = {"node2vec": 0, "vgae": 1}


def default_omega_floor(num_nodes: int) -> float:
    """Strictly positive lower bound for the weights, never below 2/N."""
    return max(1e-2, 2.0 / num_nodes)


def pool_patches(h0: np.ndarray, g: GraphDataset, num_hops: int) -> np.ndarray:
    """Mean-pool base embeddings over k-hop ego-nets, then L2-normalize.

    Returns an array of shape ``(N, num_hops + 1, d)``; hop 0 is the
    normalized base embedding itself.
    """
    n = g.num_nodes
    if h0.shape[0] != n:
        raise DataError(f"embedding rows {h0.shape[0]} != num_nodes {n}")
    reach = sp.identity(n, dtype=np.float64, format="csr")
    step = (g.adjacency + sp.identity(n, format="csr")).tocsr()
    step.data[:] = 1.0
    out = np.empty((n, num_hops + 1, h0.shape[1]), dtype=np.float64)
    for k in range(num_hops + 1):
        if k > 0:
            reach = (reach @ step).tocsr()
            reach.data[:] = 1.0
        sizes = np.asarray(reach.sum(axis=1)).ravel()
        pooled = (reach @ h0) / sizes[:, None]
        out[:, k, :] = _normalize_rows(pooled)
    return out


def _normalize_rows(x: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(x, axis=1)
    norms[norms == 0.0] = 1.0
    return x / norms[:, None]


def patch_weight(h: np.ndarray, i: int, j: int, k: int, floor: float) -> float:
    """Soft-negative weight for one (anchor, candidate, hop) triple."""
    if i == j:
        raise DataError("no weight is defined for the positive pair (i == j)")
    final_hop = h.shape[1] - 1
    eta = float(np.clip(h[i, final_hop] @ h[j, k], 0.0, 1.0))
    return max(floor, 1.0 - eta)


def _omega_rows(h: np.ndarray, k: int, rows, floor: float) -> np.ndarray:
    """Shared kernel behind both table modes; float32 output."""
    final_hop = h.shape[1] - 1
    anchors = h[rows, final_hop, :] if rows is not None else h[:, final_hop, :]
    eta = np.clip(anchors @ h[:, k, :].T, 0.0, 1.0)
    return np.maximum(np.float32(floor), (1.0 - eta).astype(np.float32))


class AffinityTable:
    """Per-hop soft-negative weights, precomputed or computed on demand.

    The diagonal is meaningless (no weight exists for i == j); consumers
    must exclude it. ``log_omega`` memoizes its result in precompute mode
    because the weights never change during training.
    """

    def __init__(self, h: np.ndarray, floor: float, precomputed: list[np.ndarray] | None):
        self.patch_embeddings = h
        self.floor = float(floor)
        self.num_hops = h.shape[1] - 1
        self.num_nodes = h.shape[0]
        self._mats = precomputed
        self._logs: dict[int, np.ndarray] = {}

    @property
    def mode(self) -> str:
        return "precompute" if self._mats is not None else "lazy"

    def omega(self, k: int, rows=None) -> np.ndarray:
        """Weight matrix (or row block) for hop k, float32."""
        if self._mats is not None:
            return self._mats[k] if rows is None else self._mats[k][rows]
        return _omega_rows(self.patch_embeddings, k, rows, self.floor)

    def log_omega(self, k: int) -> np.ndarray:
        """log(omega) for hop k as float64, cached in precompute mode."""
        if k in self._logs:
            return self._logs[k]
        logw = np.log(self.omega(k).astype(np.float64))
        if self._mats is not None:
            self._logs[k] = logw
        return logw

    def omega_pairs(self, k: int, ii: np.ndarray, jj: np.ndarray) -> np.ndarray:
        """Weights for explicit (anchor, candidate) index pairs."""
        if self._mats is not None:
            return self._mats[k][ii, jj]
        h = self.patch_embeddings
        final_hop = h.shape[1] - 1
        eta = np.clip(np.sum(h[ii, final_hop, :] * h[jj, k, :], axis=1), 0.0, 1.0)
        return np.maximum(np.float32(self.floor), (1.0 - eta).astype(np.float32))


class UnitAffinity:
    """Degenerate table with every weight equal to 1 (plain hard negatives)."""

    def __init__(self, num_nodes: int, num_hops: int):
        self.num_nodes = num_nodes
        self.num_hops = num_hops
        self.floor = 1.0

    @property
    def mode(self) -> str:
        return "unit"

    def omega(self, k: int, rows=None) -> np.ndarray:
        m = self.num_nodes if rows is None else np.atleast_1d(np.arange(self.num_nodes)[rows]).shape[0]
        return np.ones((m, self.num_nodes), dtype=np.float32)

    def log_omega(self, k: int) -> np.ndarray:
        return np.zeros((self.num_nodes, self.num_nodes))

    def omega_pairs(self, k: int, ii: np.ndarray, jj: np.ndarray) -> np.ndarray:
        return np.ones(np.asarray(ii).shape[0], dtype=np.float32)


def materialize(
    h: np.ndarray,
    mode: str = "auto",
    memory_budget: int = 1 << 30,
    floor: float | None = None,
) -> AffinityTable:
    """Build the weight table, choosing storage by memory budget.

    ``auto`` precomputes when the dense tables fit in ``memory_budget``
    bytes ((num_hops + 1) * N^2 float32 entries) and falls back to lazy
    row computation otherwise.
    """
    n, hops_plus_1, _ = h.shape
    if floor is None:
        floor = default_omega_floor(n)
    needed = hops_plus_1 * n * n * 4
    if mode == "auto":
        mode = "precompute" if needed <= memory_budget else "lazy"
    if mode == "precompute":
        if needed > memory_budget:
            raise ConfigError(
                f"precomputed weights need {needed} bytes, budget is {memory_budget}"
            )
        mats = [_omega_rows(h, k, None, floor) for k in range(hops_plus_1)]
        return AffinityTable(h, floor, mats)
    if mode == "lazy":
        return AffinityTable(h, floor, None)
    raise ConfigError(f"unknown affinity mode {mode!r}")


def save_patch_embeddings(
    path: str | Path, h: np.ndarray, backend: str, seed: int
) -> None:
    """Cache pooled patch embeddings so training can skip recomputation."""
    n, hops_plus_1, d = h.shape
    with open(path, "wb") as fh:
        fh.write(_CACHE_MAGIC)
        fh.write(
            struct.pack(
                "<IIIIBq",
                _CACHE_VERSION,
                n,
                hops_plus_1 - 1,
                d,
                BACKEND_IDS[backend],
                seed,
            )
        )
        fh.write(np.ascontiguousarray(h, dtype="<f8").tobytes())


def load_patch_embeddings(path: str | Path) -> tuple[np.ndarray, str, int]:
    """Read a cache written by :func:`save_patch_embeddings`."""
    raw = Path(path).read_bytes()
    if raw[:4] != _CACHE_MAGIC:
        raise DataError("not a patch-embedding cache (bad magic)", path=path)
    version, n, hops, d, backend_id, seed = struct.unpack_from("<IIIIBq", raw, 4)
    if version != _CACHE_VERSION:
        raise DataError(f"unsupported cache version {version}", path=path)
    header = 4 + struct.calcsize("<IIIIBq")
    h = np.frombuffer(raw, dtype="<f8", offset=header).reshape(n, hops + 1, d)
    backend = {v: k for k, v in BACKEND_IDS.items()}[backend_id]
    return h.copy(), backend, seed
