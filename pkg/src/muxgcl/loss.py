"""Cross-scale contrastive objective with soft-negative weighting.

For anchor i the final-layer vector of one view is contrasted against the
hop-k vectors of both views: the matching node in the other view is the
positive, every other node contributes two weighted negative terms (other
view and same view, both at hop k). Per-hop losses are mixed by a convex
weight vector and symmetrized over the two views:

    pair     log[ e^{s_ii/t} / (e^{s_ii/t} + sum_j w_ij e^{s'_ij/t}
                                           + sum_j w_ij e^{s''_ij/t}) ]
    total    mean over nodes and both view orderings of the weighted pairs

Similarities are cosines of the projected contrast vectors; all sums are
evaluated in log space with max subtraction. Setting every weight to 1 and
putting all mixture mass on the final hop recovers the plain same-scale
InfoNCE objective ("grace" mode). ``loss_gradients`` returns the exact
gradient of the *negated* total (the quantity the trainer minimizes) with
respect to every contrast vector of both views.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, NumericError
from .pae.affinity import AffinityTable, UnitAffinity

MODES = ("mux", "grace")


@dataclass(frozen=True)
class LossConfig:
    tau: float
    lambdas: np.ndarray
    affinity: AffinityTable | UnitAffinity
    mode: str = "mux"

    def __post_init__(self):
        if self.tau <= 0.0:
            raise ConfigError(f"temperature must be positive, got {self.tau}")
        lam = np.asarray(self.lambdas, dtype=np.float64)
        object.__setattr__(self, "lambdas", lam)
        if (lam < 0).any():
            raise ConfigError("mixture weights must be non-negative")
        if abs(lam.sum() - 1.0) > 1e-9:
            raise ConfigError(f"mixture weights must sum to 1, got {lam.sum()!r}")
        if self.mode not in MODES:
            raise ConfigError(f"unknown loss mode {self.mode!r}")


def uniform_lambdas(num_hops: int) -> np.ndarray:
    return np.full(num_hops + 1, 1.0 / (num_hops + 1))


def onehot_lambdas(num_hops: int) -> np.ndarray:
    lam = np.zeros(num_hops + 1)
    lam[num_hops] = 1.0
    return lam


def _effective(cfg: LossConfig, num_hops: int):
    """Resolve mode: grace pins the weights to 1 and the mixture to hop L."""
    if cfg.mode == "grace":
        n = cfg.affinity.num_nodes
        return onehot_lambdas(num_hops), UnitAffinity(n, num_hops)
    if cfg.lambdas.shape[0] != num_hops + 1:
        raise ConfigError(
            f"expected {num_hops + 1} mixture weights, got {cfg.lambdas.shape[0]}"
        )
    return cfg.lambdas, cfg.affinity


def _unit_rows(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    norms = np.linalg.norm(z, axis=1)
    if (norms == 0.0).any():
        raise NumericError("zero-norm contrast vector")
    return z / norms[:, None], norms


def _log_weights(aff, k: int) -> np.ndarray | None:
    return None if isinstance(aff, UnitAffinity) else aff.log_omega(k)


def _hop_terms(a_hat, b_hat, c_hat, logw, tau):
    """Log-space pieces shared by the loss and its gradient.

    Returns (per-node losses, softmax tables r1/r2 over the two negative
    blocks). r1's diagonal is the positive's share of the denominator.
    """
    s1 = (a_hat @ b_hat.T) / tau
    s2 = (a_hat @ c_hat.T) / tau
    pos = np.diag(s1).copy()
    m1 = s1 if logw is None else s1 + logw
    m2 = s2 if logw is None else s2 + logw
    np.fill_diagonal(m1, pos)
    np.fill_diagonal(m2, -np.inf)
    m = np.maximum(m1.max(axis=1), m2.max(axis=1))
    r1 = np.exp(m1 - m[:, None])
    r2 = np.exp(m2 - m[:, None])
    denom = r1.sum(axis=1) + r2.sum(axis=1)
    log_d = m + np.log(denom)
    r1 /= denom[:, None]
    r2 /= denom[:, None]
    return pos - log_d, r1, r2


def pair_loss(z_u: list[np.ndarray], z_v: list[np.ndarray], i: int, k: int,
              cfg: LossConfig) -> float:
    """Loss of one anchor at one hop, view u anchoring against view v."""
    num_hops = len(z_u) - 1
    _, aff = _effective(cfg, num_hops)
    a_hat, _ = _unit_rows(z_u[num_hops])
    b_hat, _ = _unit_rows(z_v[k])
    c_hat, _ = _unit_rows(z_u[k])
    anchor = a_hat[i]
    s_b = (b_hat @ anchor) / cfg.tau
    s_c = (c_hat @ anchor) / cfg.tau
    logw = np.log(aff.omega(k, rows=[i]).astype(np.float64)).ravel()
    others = np.arange(a_hat.shape[0]) != i
    terms = np.concatenate(
        [[s_b[i]], s_b[others] + logw[others], s_c[others] + logw[others]]
    )
    m = terms.max()
    return float(s_b[i] - (m + np.log(np.exp(terms - m).sum())))


def node_loss(z_u: list[np.ndarray], z_v: list[np.ndarray], i: int,
              cfg: LossConfig) -> float:
    """Convex combination of one anchor's per-hop losses."""
    num_hops = len(z_u) - 1
    lambdas, _ = _effective(cfg, num_hops)
    return float(
        sum(lambdas[k] * pair_loss(z_u, z_v, i, k, cfg)
            for k in range(num_hops + 1) if lambdas[k] != 0.0)
    )


def total_loss(z_u: list[np.ndarray], z_v: list[np.ndarray],
               cfg: LossConfig) -> float:
    """Symmetrized objective averaged over nodes and both view orderings."""
    num_hops = len(z_u) - 1
    lambdas, aff = _effective(cfg, num_hops)
    u_hat = [_unit_rows(z)[0] for z in z_u]
    v_hat = [_unit_rows(z)[0] for z in z_v]
    n = z_u[0].shape[0]
    acc = 0.0
    for k in range(num_hops + 1):
        if lambdas[k] == 0.0:
            continue
        logw = _log_weights(aff, k)
        fwd, _, _ = _hop_terms(u_hat[num_hops], v_hat[k], u_hat[k], logw, cfg.tau)
        bwd, _, _ = _hop_terms(v_hat[num_hops], u_hat[k], v_hat[k], logw, cfg.tau)
        acc += lambdas[k] * (fwd.sum() + bwd.sum())
    return acc / (2.0 * n)


def grace_loss(z_u: list[np.ndarray], z_v: list[np.ndarray],
               cfg: LossConfig) -> float:
    """Plain same-scale InfoNCE: unit weights, all mass on the final hop."""
    return total_loss(z_u, z_v, replace(cfg, mode="grace"))


def loss_gradients(
    z_u: list[np.ndarray], z_v: list[np.ndarray], cfg: LossConfig
) -> tuple[float, list[np.ndarray], list[np.ndarray]]:
    """Objective to minimize (negated total) and its exact gradients.

    Returns ``(objective, d_zu, d_zv)`` with one gradient array per hop per
    view. Hops that receive no contribution (zero mixture weight) come back
    as zero arrays.
    """
    num_hops = len(z_u) - 1
    lambdas, aff = _effective(cfg, num_hops)
    n = z_u[0].shape[0]
    u_norm = [_unit_rows(z) for z in z_u]
    v_norm = [_unit_rows(z) for z in z_v]
    u_hat = [h for h, _ in u_norm]
    v_hat = [h for h, _ in v_norm]
    d_u_hat = [np.zeros_like(z) for z in z_u]
    d_v_hat = [np.zeros_like(z) for z in z_v]

    value = 0.0
    eye = np.eye(n)
    for k in range(num_hops + 1):
        if lambdas[k] == 0.0:
            continue
        logw = _log_weights(aff, k)
        scale = -lambdas[k] / (2.0 * n)
        for a_hat, b_hat, c_hat, da, db, dc in (
            (u_hat[num_hops], v_hat[k], u_hat[k],
             d_u_hat[num_hops], d_v_hat[k], d_u_hat[k]),
            (v_hat[num_hops], u_hat[k], v_hat[k],
             d_v_hat[num_hops], d_u_hat[k], d_v_hat[k]),
        ):
            losses, r1, r2 = _hop_terms(a_hat, b_hat, c_hat, logw, cfg.tau)
            value += scale * losses.sum()
            g1 = (scale / cfg.tau) * (eye - r1)
            g2 = (-scale / cfg.tau) * r2
            da += g1 @ b_hat + g2 @ c_hat
            db += g1.T @ a_hat
            dc += g2.T @ a_hat

    d_zu = [_through_normalization(dh, h, nrm)
            for dh, (h, nrm) in zip(d_u_hat, u_norm)]
    d_zv = [_through_normalization(dh, h, nrm)
            for dh, (h, nrm) in zip(d_v_hat, v_norm)]
    return value, d_zu, d_zv


def _through_normalization(d_hat, z_hat, norms):
    """Chain rule through row-wise L2 normalization."""
    radial = np.sum(d_hat * z_hat, axis=1, keepdims=True)
    return (d_hat - radial * z_hat) / norms[:, None]
