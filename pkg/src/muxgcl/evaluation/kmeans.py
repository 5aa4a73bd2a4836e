"""Lloyd's algorithm with k-means++ seeding.

Iterates to an assignment fixpoint (or an iteration cap); a cluster that
empties is reseeded to the point farthest from its assigned center, which
keeps exactly k non-empty clusters.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError


def _sq_dists(x: np.ndarray, centers: np.ndarray) -> np.ndarray:
    d2 = (
        np.sum(x * x, axis=1)[:, None]
        - 2.0 * (x @ centers.T)
        + np.sum(centers * centers, axis=1)[None, :]
    )
    return np.maximum(d2, 0.0)


def _kmeans_pp(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = x.shape[0]
    centers = np.empty((k, x.shape[1]))
    centers[0] = x[rng.integers(n)]
    closest = _sq_dists(x, centers[:1]).ravel()
    for j in range(1, k):
        total = closest.sum()
        if total <= 0.0:
            centers[j] = x[rng.integers(n)]
            continue
        probs = closest / total
        centers[j] = x[rng.choice(n, p=probs)]
        closest = np.minimum(closest, _sq_dists(x, centers[j : j + 1]).ravel())
    return centers


class KMeans(BaseEstimator):
    def __init__(self, n_clusters: int, seed: int = 0, max_iter: int = 300):
        self.n_clusters = n_clusters
        self.seed = seed
        self.max_iter = max_iter

    def fit(self, x: np.ndarray) -> "KMeans":
        x = np.asarray(x, dtype=np.float64)
        n, k = x.shape[0], self.n_clusters
        if k < 1 or k > n:
            raise ValueError(f"need 1 <= n_clusters <= {n}, got {k}")
        rng = np.random.default_rng(self.seed)
        centers = _kmeans_pp(x, k, rng)
        labels = np.full(n, -1)
        for _ in range(self.max_iter):
            d2 = _sq_dists(x, centers)
            new_labels = d2.argmin(axis=1)
            min_d2 = d2[np.arange(n), new_labels]
            for j in range(k):
                if not (new_labels == j).any():
                    far = int(np.argmax(min_d2))
                    centers[j] = x[far]
                    new_labels[far] = j
                    min_d2[far] = 0.0
            if (new_labels == labels).all():
                break
            labels = new_labels
            for j in range(k):
                members = labels == j
                if members.any():
                    centers[j] = x[members].mean(axis=0)
        self.cluster_centers_ = centers
        self.labels_ = labels
        self.inertia_ = float(_sq_dists(x, centers)[np.arange(n), labels].sum())
        return self

    def fit_predict(self, x: np.ndarray) -> np.ndarray:
        return self.fit(x).labels_

    def predict(self, x: np.ndarray) -> np.ndarray:
        if not hasattr(self, "cluster_centers_"):
            raise NotFittedError("fit the model first")
        return _sq_dists(np.asarray(x, dtype=np.float64),
                         self.cluster_centers_).argmin(axis=1)
