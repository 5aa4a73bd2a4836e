"""Partition-agreement metrics computed from the contingency table."""

from __future__ import annotations

import numpy as np


def accuracy(truth: np.ndarray, pred: np.ndarray) -> float:
    truth = np.asarray(truth)
    pred = np.asarray(pred)
    if truth.shape != pred.shape:
        raise ValueError("shape mismatch between truth and predictions")
    return float(np.mean(truth == pred))


def _contingency(truth: np.ndarray, pred: np.ndarray) -> np.ndarray:
    _, ti = np.unique(truth, return_inverse=True)
    _, pi = np.unique(pred, return_inverse=True)
    table = np.zeros((ti.max() + 1, pi.max() + 1), dtype=np.int64)
    np.add.at(table, (ti, pi), 1)
    return table


def _entropy(counts: np.ndarray) -> float:
    p = counts[counts > 0] / counts.sum()
    return float(-(p * np.log(p)).sum())


def nmi(truth: np.ndarray, pred: np.ndarray) -> float:
    """Mutual information normalized by the arithmetic mean of entropies.

    Degenerate partitions (either side constant) give 0 by the 0/0 := 0
    convention.
    """
    table = _contingency(np.asarray(truth), np.asarray(pred))
    n = table.sum()
    a = table.sum(axis=1)
    b = table.sum(axis=0)
    nz = table > 0
    pij = table[nz] / n
    outer = (a[:, None] * b[None, :])[nz] / (n * n)
    mi = float((pij * np.log(pij / outer)).sum())
    denom = 0.5 * (_entropy(a) + _entropy(b))
    if denom == 0.0:
        return 0.0
    return mi / denom


def ari(truth: np.ndarray, pred: np.ndarray) -> float:
    """Adjusted Rand index via pair-counting contingency sums."""
    table = _contingency(np.asarray(truth), np.asarray(pred))
    n = table.sum()
    sum_ij = float((table * (table - 1) // 2).sum())
    a = table.sum(axis=1)
    b = table.sum(axis=0)
    sum_a = float((a * (a - 1) // 2).sum())
    sum_b = float((b * (b - 1) // 2).sum())
    total = n * (n - 1) / 2
    expected = sum_a * sum_b / total if total else 0.0
    max_index = 0.5 * (sum_a + sum_b)
    if max_index == expected:
        return 1.0 if sum_ij == expected else 0.0
    return (sum_ij - expected) / (max_index - expected)
