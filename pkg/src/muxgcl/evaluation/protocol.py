"""Evaluation protocol: frozen embeddings, per-seed downstream models.

Embeddings come from a clean (un-augmented) forward pass and stay fixed;
the classifier or clustering is re-run once per seed with a fresh split or
initialization, and the report carries the per-seed values plus summary
statistics.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..augment import GraphView
from ..datasets import GraphDataset, normalize_adjacency, random_split
from ..encoder import EncoderParams, forward
from ..evaluation.kmeans import KMeans
from ..evaluation.logreg import LogisticRegressionGD
from ..evaluation.metrics import accuracy, ari, nmi


@dataclass
class EvalReport:
    task: str
    seeds: list[int]
    per_seed: dict[str, list[float]]
    provenance: str = ""
    mean: dict[str, float] = field(default_factory=dict)
    std: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        for metric, values in self.per_seed.items():
            arr = np.asarray(values, dtype=np.float64)
            self.mean[metric] = float(arr.mean())
            self.std[metric] = float(arr.std())

    def to_json(self) -> str:
        return json.dumps(
            {
                "task": self.task,
                "seeds": self.seeds,
                "per_seed": self.per_seed,
                "mean": self.mean,
                "std": self.std,
                "provenance": self.provenance,
            },
            indent=2,
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n")

    def format_table(self) -> str:
        lines = [f"task: {self.task}   ({self.provenance})"]
        header = "metric  " + "  ".join(f"seed={s}" for s in self.seeds)
        lines.append(header)
        for metric, values in self.per_seed.items():
            row = f"{metric:7s} " + "  ".join(f"{v:.4f}" for v in values)
            row += f"   mean={self.mean[metric]:.4f} +- {self.std[metric]:.4f}"
            lines.append(row)
        return "\n".join(lines)


def embed_clean(dataset: GraphDataset, params: EncoderParams) -> np.ndarray:
    """Final-layer representations on the clean graph (no projection head)."""
    view = GraphView(
        adjacency=normalize_adjacency(dataset.adjacency),
        features=dataset.features,
    )
    return forward(view, params).layers[-1]


def _prepare(embeddings: np.ndarray, normalize: bool) -> np.ndarray:
    if not normalize:
        return embeddings
    norms = np.linalg.norm(embeddings, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return embeddings / norms


def evaluate_classification(
    dataset: GraphDataset,
    embeddings: np.ndarray,
    seeds=(0, 1, 2, 3, 4),
    split_fractions=(0.1, 0.1, 0.8),
    l2: float = 0.01,
    normalize: bool = True,
    provenance: str = "",
) -> EvalReport:
    """Accuracy of an L2-regularized softmax classifier per split seed."""
    x = _prepare(embeddings, normalize)
    y = dataset.labels
    scores = []
    for seed in seeds:
        split = random_split(dataset.num_nodes, split_fractions, seed)
        clf = LogisticRegressionGD(l2=l2, n_classes=dataset.num_classes)
        clf.fit(x[split.train], y[split.train])
        scores.append(accuracy(y[split.test], clf.predict(x[split.test])))
    return EvalReport(
        task="classification",
        seeds=list(seeds),
        per_seed={"accuracy": scores},
        provenance=provenance,
    )


def evaluate_clustering(
    dataset: GraphDataset,
    embeddings: np.ndarray,
    seeds=(0, 1, 2, 3, 4),
    n_clusters: int | None = None,
    normalize: bool = True,
    provenance: str = "",
) -> EvalReport:
    """k-means agreement with the labels (k defaults to the class count)."""
    x = _prepare(embeddings, normalize)
    k = dataset.num_classes if n_clusters is None else n_clusters
    nmis, aris = [], []
    for seed in seeds:
        pred = KMeans(n_clusters=k, seed=seed).fit_predict(x)
        nmis.append(nmi(dataset.labels, pred))
        aris.append(ari(dataset.labels, pred))
    return EvalReport(
        task="clustering",
        seeds=list(seeds),
        per_seed={"nmi": nmis, "ari": aris},
        provenance=provenance,
    )
