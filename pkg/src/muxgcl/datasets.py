"""Graph loading, validation and basic structural queries.

A dataset lives on disk as a directory of four text files:

    meta.json      {"num_nodes": N, "num_features": F, "num_classes": C, "name": ...}
    edges.tsv      one "u<TAB>v" pair per line, 0-based indices
    features.tsv   sparse triplets "node<TAB>feature_index<TAB>value"
    labels.tsv     one "node<TAB>label" per line, every node exactly once

Graphs are undirected: edge lists are symmetrized and deduplicated on load,
self-loops are dropped (with a logged count). Features are kept dense in
memory; adjacency is CSR with sorted indices.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .errors import DataError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GraphDataset:
    """Immutable undirected graph with dense node features and labels.

    ``adjacency`` is a binary symmetric CSR matrix without self-loops;
    ``features`` is a dense ``(num_nodes, num_features)`` float array and
    ``labels`` an integer vector with values in ``[0, num_classes)``.
    """

    name: str
    num_nodes: int
    num_features: int
    num_classes: int
    adjacency: sp.csr_matrix
    features: np.ndarray
    labels: np.ndarray

    @property
    def num_edges(self) -> int:
        """Number of undirected edges."""
        return self.adjacency.nnz // 2

    def validate(self) -> "GraphDataset":
        """Check every structural invariant; raise DataError on violation."""
        a = self.adjacency
        if a.shape != (self.num_nodes, self.num_nodes):
            raise DataError(f"adjacency shape {a.shape} != ({self.num_nodes},) * 2")
        if (a != a.T).nnz != 0:
            raise DataError("adjacency is not symmetric")
        if a.diagonal().any():
            raise DataError("adjacency stores self-loops")
        if a.nnz and not (a.data == 1).all():
            raise DataError("adjacency entries must all be 1")
        _check_sorted_unique_columns(a)
        if self.features.shape != (self.num_nodes, self.num_features):
            raise DataError(
                f"feature shape {self.features.shape} != "
                f"({self.num_nodes}, {self.num_features})"
            )
        if not np.isfinite(self.features).all():
            raise DataError("non-finite feature value")
        if self.labels.shape != (self.num_nodes,):
            raise DataError("labels must have one entry per node")
        if self.labels.min(initial=0) < 0 or (
            self.num_nodes and self.labels.max() >= self.num_classes
        ):
            raise DataError(f"labels outside [0, {self.num_classes})")
        return self


@dataclass(frozen=True)
class Split:
    """Disjoint train/val/test node index sets covering all nodes."""

    train: np.ndarray
    val: np.ndarray
    test: np.ndarray
    seed: int


def _check_sorted_unique_columns(a: sp.csr_matrix) -> None:
    for i in range(a.shape[0]):
        row = a.indices[a.indptr[i] : a.indptr[i + 1]]
        if row.size > 1 and not (np.diff(row) > 0).all():
            raise DataError(f"row {i}: column indices not strictly increasing")


def _edges_to_csr(edges: np.ndarray, n: int) -> sp.csr_matrix:
    """Symmetrize, deduplicate and sort an edge list into binary CSR."""
    if edges.size == 0:
        return sp.csr_matrix((n, n))
    u, v = edges[:, 0], edges[:, 1]
    rows = np.concatenate([u, v])
    cols = np.concatenate([v, u])
    a = sp.coo_matrix((np.ones(rows.size), (rows, cols)), shape=(n, n)).tocsr()
    a.data[:] = 1.0
    a.sort_indices()
    return a


def graph_from_edges(
    num_nodes: int,
    edges,
    features: np.ndarray,
    labels,
    num_classes: int,
    name: str = "graph",
) -> GraphDataset:
    """Build a validated dataset from an edge list (symmetrized, deduped)."""
    edge_arr = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if edge_arr.size:
        keep = edge_arr[:, 0] != edge_arr[:, 1]
        edge_arr = edge_arr[keep]
    features = np.asarray(features, dtype=np.float64)
    return GraphDataset(
        name=name,
        num_nodes=num_nodes,
        num_features=features.shape[1],
        num_classes=num_classes,
        adjacency=_edges_to_csr(edge_arr, num_nodes),
        features=features,
        labels=np.asarray(labels, dtype=np.int64),
    ).validate()


def load_dataset(path: str | Path) -> GraphDataset:
    """Load and validate a dataset directory.

    Every parse error is reported with its file and line number. Self-loops
    in ``edges.tsv`` are dropped (logged); duplicate and reversed edges
    collapse to a single undirected edge.
    """
    root = Path(path)
    meta_path = root / "meta.json"
    if not meta_path.is_file():
        raise DataError("missing file", path=meta_path)
    try:
        meta = json.loads(meta_path.read_text())
    except json.JSONDecodeError as e:
        raise DataError(f"invalid JSON: {e}", path=meta_path) from e
    try:
        n = int(meta["num_nodes"])
        f = int(meta["num_features"])
        c = int(meta["num_classes"])
    except KeyError as e:
        raise DataError(f"meta.json missing key {e}", path=meta_path) from e
    name = str(meta.get("name", root.name))

    edges, dropped = _read_edges(root / "edges.tsv", n)
    if dropped:
        log.warning("%s: dropped %d self-loop(s)", root / "edges.tsv", dropped)
    features = _read_features(root / "features.tsv", n, f)
    labels = _read_labels(root / "labels.tsv", n, c)

    return GraphDataset(
        name=name,
        num_nodes=n,
        num_features=f,
        num_classes=c,
        adjacency=_edges_to_csr(edges, n),
        features=features,
        labels=labels,
    ).validate()


def _open_lines(path: Path):
    if not path.is_file():
        raise DataError("missing file", path=path)
    return enumerate(path.read_text().splitlines(), start=1)


def _read_edges(path: Path, n: int) -> tuple[np.ndarray, int]:
    pairs = []
    self_loops = 0
    for lineno, line in _open_lines(path):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise DataError("expected 'u<TAB>v'", path=path, line=lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise DataError(f"non-integer node id {parts!r}", path=path, line=lineno)
        if not (0 <= u < n and 0 <= v < n):
            raise DataError(f"node index out of range: {u}, {v}", path=path, line=lineno)
        if u == v:
            self_loops += 1
            continue
        pairs.append((u, v))
    return np.asarray(pairs, dtype=np.int64).reshape(-1, 2), self_loops


def _read_features(path: Path, n: int, f: int) -> np.ndarray:
    x = np.zeros((n, f), dtype=np.float64)
    for lineno, line in _open_lines(path):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise DataError("expected 'node<TAB>feature<TAB>value'", path=path, line=lineno)
        try:
            i, j, value = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise DataError(f"bad triplet {parts!r}", path=path, line=lineno)
        if not (0 <= i < n):
            raise DataError(f"node index out of range: {i}", path=path, line=lineno)
        if not (0 <= j < f):
            raise DataError(f"feature index out of range: {j}", path=path, line=lineno)
        if not np.isfinite(value):
            raise DataError(f"non-finite feature value {parts[2]!r}", path=path, line=lineno)
        x[i, j] = value
    return x


def _read_labels(path: Path, n: int, c: int) -> np.ndarray:
    labels = np.full(n, -1, dtype=np.int64)
    for lineno, line in _open_lines(path):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise DataError("expected 'node<TAB>label'", path=path, line=lineno)
        try:
            i, y = int(parts[0]), int(parts[1])
        except ValueError:
            raise DataError(f"bad label line {parts!r}", path=path, line=lineno)
        if not (0 <= i < n):
            raise DataError(f"node index out of range: {i}", path=path, line=lineno)
        if not (0 <= y < c):
            raise DataError(f"label out of range: {y} >= {c}", path=path, line=lineno)
        if labels[i] != -1:
            raise DataError(f"duplicate label for node {i}", path=path, line=lineno)
        labels[i] = y
    missing = np.flatnonzero(labels == -1)
    if missing.size:
        raise DataError(f"missing labels for nodes {missing[:10].tolist()}", path=path)
    return labels


def save_dataset(g: GraphDataset, path: str | Path) -> None:
    """Write a dataset directory; inverse of :func:`load_dataset`.

    Output is canonical (edges sorted with u < v, feature triplets sorted by
    node then feature index, floats via ``repr``), so load -> save -> load
    round-trips bit-exactly.
    """
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    meta = {
        "num_nodes": g.num_nodes,
        "num_features": g.num_features,
        "num_classes": g.num_classes,
        "name": g.name,
    }
    (root / "meta.json").write_text(json.dumps(meta, indent=2) + "\n")

    upper = sp.triu(g.adjacency, k=1).tocoo()
    order = np.lexsort((upper.col, upper.row))
    edge_lines = [f"{upper.row[i]}\t{upper.col[i]}" for i in order]
    (root / "edges.tsv").write_text("\n".join(edge_lines) + ("\n" if edge_lines else ""))

    rows, cols = np.nonzero(g.features)
    feat_lines = [f"{i}\t{j}\t{float(g.features[i, j])!r}" for i, j in zip(rows, cols)]
    (root / "features.tsv").write_text("\n".join(feat_lines) + ("\n" if feat_lines else ""))

    label_lines = [f"{i}\t{g.labels[i]}" for i in range(g.num_nodes)]
    (root / "labels.tsv").write_text("\n".join(label_lines) + "\n")


def normalize_adjacency(adjacency: sp.spmatrix) -> sp.csr_matrix:
    """Symmetric degree normalization of the self-loop-augmented adjacency.

    Returns D^{-1/2} (A + I) D^{-1/2} where D is the degree matrix of A + I.
    Isolated nodes end up with the single diagonal entry 1.
    """
    n = adjacency.shape[0]
    a_hat = (adjacency + sp.identity(n, format="csr")).tocsr()
    deg = np.asarray(a_hat.sum(axis=1)).ravel()
    d_inv_sqrt = 1.0 / np.sqrt(deg)
    out = sp.diags(d_inv_sqrt) @ a_hat @ sp.diags(d_inv_sqrt)
    out = out.tocsr()
    out.sort_indices()
    return out


def random_split(
    num_nodes: int,
    fractions: tuple[float, float, float],
    seed: int,
) -> Split:
    """Partition node indices into train/val/test by a seeded permutation.

    Train and val sizes are floored; the remainder goes to test. Deterministic
    for a fixed (num_nodes, fractions, seed).
    """
    if num_nodes < 3:
        raise DataError(f"cannot split {num_nodes} nodes into three non-empty sets")
    fr = np.asarray(fractions, dtype=float)
    if fr.shape != (3,) or (fr <= 0).any():
        raise DataError(f"fractions must be three positive numbers, got {fractions}")
    if abs(fr.sum() - 1.0) > 1e-9:
        raise DataError(f"fractions must sum to 1, got {fr.sum()!r}")
    perm = np.random.default_rng(seed).permutation(num_nodes)
    n_train = int(num_nodes * fr[0])
    n_val = int(num_nodes * fr[1])
    return Split(
        train=np.sort(perm[:n_train]),
        val=np.sort(perm[n_train : n_train + n_val]),
        test=np.sort(perm[n_train + n_val :]),
        seed=seed,
    )


def khop_egonet(g: GraphDataset, node: int, k: int) -> np.ndarray:
    """Sorted ids of all nodes within shortest-path distance k of ``node``."""
    if not (0 <= node < g.num_nodes):
        raise DataError(f"node {node} out of range [0, {g.num_nodes})")
    if k < 0:
        raise DataError(f"hop count must be >= 0, got {k}")
    indptr, indices = g.adjacency.indptr, g.adjacency.indices
    seen = np.zeros(g.num_nodes, dtype=bool)
    seen[node] = True
    frontier = np.array([node], dtype=np.int64)
    for _ in range(k):
        if frontier.size == 0:
            break
        neigh = np.concatenate(
            [indices[indptr[u] : indptr[u + 1]] for u in frontier]
        )
        neigh = np.unique(neigh)
        frontier = neigh[~seen[neigh]]
        seen[frontier] = True
    return np.flatnonzero(seen)
