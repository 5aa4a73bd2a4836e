"""Multinomial logistic regression solved by gradient descent.

Deliberately self-contained (no external solver) so downstream numbers do
not depend on a library version: full-batch gradient descent on the softmax
cross-entropy with an L2 penalty, using backtracking line search, stopped
when the gradient norm drops below ``tol``.
"""

from __future__ import annotations

import warnings

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.exceptions import NotFittedError


def _log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


class LogisticRegressionGD(BaseEstimator, ClassifierMixin):
    """L2-regularized softmax classifier without intercept.

    Minimizes ``mean cross-entropy + l2 * ||W||^2 / 2``. With the penalty
    taken to infinity the weights collapse to zero and every prediction
    falls back to the lowest class index (argmax tie-breaking).
    """

    def __init__(self, l2: float = 0.01, n_classes: int | None = None,
                 tol: float = 1e-5, max_iter: int = 3000):
        self.l2 = l2
        self.n_classes = n_classes
        self.tol = tol
        self.max_iter = max_iter

    def _objective(self, w, x, onehot):
        logp = _log_softmax(x @ w)
        ce = -float(np.sum(onehot * logp)) / x.shape[0]
        return ce + 0.5 * self.l2 * float(np.sum(w * w))

    def fit(self, x: np.ndarray, y: np.ndarray) -> "LogisticRegressionGD":
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        if x.shape[0] == 0:
            raise ValueError("empty training set")
        c = self.n_classes if self.n_classes is not None else int(y.max()) + 1
        present = np.unique(y)
        missing = sorted(set(range(c)) - set(present.tolist()))
        if missing:
            warnings.warn(f"classes absent from training data: {missing}")

        m = x.shape[0]
        onehot = np.zeros((m, c))
        onehot[np.arange(m), y] = 1.0
        w = np.zeros((x.shape[1], c))
        f = self._objective(w, x, onehot)
        step = 1.0
        for _ in range(self.max_iter):
            probs = np.exp(_log_softmax(x @ w))
            grad = x.T @ (probs - onehot) / m + self.l2 * w
            gnorm2 = float(np.sum(grad * grad))
            if np.sqrt(gnorm2) < self.tol:
                break
            # Backtracking line search (Armijo), step doubles on success.
            step = min(step * 2.0, 1e6)
            while step > 1e-12:
                w_new = w - step * grad
                f_new = self._objective(w_new, x, onehot)
                if f_new <= f - 1e-4 * step * gnorm2:
                    break
                step *= 0.5
            w, f = w_new, f_new
        self.coef_ = w
        self.classes_ = np.arange(c)
        return self

    def decision_function(self, x: np.ndarray) -> np.ndarray:
        if not hasattr(self, "coef_"):
            raise NotFittedError("fit the classifier first")
        return np.asarray(x, dtype=np.float64) @ self.coef_

    def predict(self, x: np.ndarray) -> np.ndarray:
        return np.argmax(self.decision_function(x), axis=1)
