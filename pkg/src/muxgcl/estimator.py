"""Estimator-style front door so the trainer composes with sklearn tooling.

``MuxGCL`` is an unsupervised transformer: ``fit`` trains the contrastive
encoder on a :class:`~muxgcl.datasets.GraphDataset`, ``transform`` returns
frozen final-layer embeddings for the same or another structurally
compatible graph. Hyperparameters are plain constructor arguments, so
``get_params``/``set_params``/``clone`` behave as usual.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .augment import AugmentConfig
from .datasets import GraphDataset
from .errors import DataError
from .evaluation.protocol import embed_clean
from .trainer import TrainConfig, train


def check_graph_dataset(x) -> GraphDataset:
    """Validate estimator input; raises DataError on anything else."""
    if not isinstance(x, GraphDataset):
        raise DataError(
            f"expected a GraphDataset, got {type(x).__name__}; "
            "load one with muxgcl.load_dataset(path)"
        )
    return x.validate()


class MuxGCL(BaseEstimator, TransformerMixin):
    def __init__(
        self,
        hidden_dims=(128, 128),
        contrast_dim=128,
        activation="relu",
        tau=0.5,
        lambdas=None,
        mode="mux",
        omega_floor=None,
        pae_backend="node2vec",
        edge_drop=(0.2, 0.4),
        feature_mask=(0.3, 0.4),
        epochs=200,
        learning_rate=5e-4,
        weight_decay=1e-5,
        random_state=0,
    ):
        self.hidden_dims = hidden_dims
        self.contrast_dim = contrast_dim
        self.activation = activation
        self.tau = tau
        self.lambdas = lambdas
        self.mode = mode
        self.omega_floor = omega_floor
        self.pae_backend = pae_backend
        self.edge_drop = edge_drop
        self.feature_mask = feature_mask
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.weight_decay = weight_decay
        self.random_state = random_state

    def _train_config(self) -> TrainConfig:
        return TrainConfig(
            augment=AugmentConfig(
                edge_drop=tuple(self.edge_drop),
                feature_mask=tuple(self.feature_mask),
            ),
            hidden=tuple(self.hidden_dims),
            contrast_dim=self.contrast_dim,
            activation=self.activation,
            tau=self.tau,
            lambdas=None if self.lambdas is None else tuple(self.lambdas),
            mode=self.mode,
            omega_floor=self.omega_floor,
            pae_backend=self.pae_backend,
            epochs=self.epochs,
            lr=self.learning_rate,
            weight_decay=self.weight_decay,
            seed=self.random_state,
        )

    def fit(self, X: GraphDataset, y=None) -> "MuxGCL":
        dataset = check_graph_dataset(X)
        self.params_, self.history_ = train(dataset, self._train_config())
        self.n_features_in_ = dataset.num_features
        return self

    def transform(self, X: GraphDataset) -> np.ndarray:
        if not hasattr(self, "params_"):
            raise NotFittedError("fit the model before calling transform")
        dataset = check_graph_dataset(X)
        if dataset.num_features != self.n_features_in_:
            raise DataError(
                f"graph has {dataset.num_features} features, "
                f"model was fitted with {self.n_features_in_}"
            )
        return embed_clean(dataset, self.params_)
