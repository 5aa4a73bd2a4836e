"""Downstream evaluation on frozen embeddings."""

from .kmeans import KMeans
from .logreg import LogisticRegressionGD
from .metrics import accuracy, ari, nmi
from .protocol import (
    EvalReport,
    embed_clean,
    evaluate_classification,
    evaluate_clustering,
)

__all__ = [
    "EvalReport",
    "KMeans",
    "LogisticRegressionGD",
    "accuracy",
    "ari",
    "embed_clean",
    "evaluate_classification",
    "evaluate_clustering",
    "nmi",
]
