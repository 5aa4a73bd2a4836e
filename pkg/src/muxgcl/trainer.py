"""End-to-end training: affinity precomputation, epoch loop, Adam, timing.

Topology embeddings and their pooled weight table are built exactly once
before the first epoch; each epoch then draws two corrupted views, runs the
encoder on both, evaluates the contrastive objective and applies one Adam
step with decoupled weight decay. Runs are deterministic per seed in
single-threaded mode (named sub-streams are derived from the master seed
for augmentation, initialization and the affinity backend).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .augment import AugmentConfig, make_views
from .datasets import GraphDataset
from .encoder import (
    EncoderParams,
    EncoderShape,
    backward,
    forward,
    init_params,
    save_params,
)
from .errors import ConfigError, DataError, NumericError
from .loss import LossConfig, onehot_lambdas, total_loss, uniform_lambdas
from .optim import AdamHyper, AdamState, adam_step
from .pae import (
    UnitAffinity,
    load_patch_embeddings,
    materialize,
    node2vec_embed,
    pool_patches,
    save_patch_embeddings,
    vgae_embed,
)
from .pae.node2vec import Node2VecConfig
from .pae.vgae import VGAEConfig

PAE_BACKENDS = ("node2vec", "vgae", "none")


@dataclass(frozen=True)
class TrainConfig:
    """Every hyperparameter of one training run."""

    augment: AugmentConfig = AugmentConfig()
    hidden: tuple[int, ...] = (128, 128)
    contrast_dim: int = 128
    activation: str = "relu"
    tau: float = 0.5
    lambdas: tuple[float, ...] | None = None
    mode: str = "mux"
    omega_floor: float | None = None
    pae_backend: str = "node2vec"
    node2vec: Node2VecConfig = Node2VecConfig()
    vgae: VGAEConfig = VGAEConfig()
    table_mode: str = "auto"
    memory_budget: int = 1 << 30
    epochs: int = 200
    lr: float = 5e-4
    weight_decay: float = 1e-5
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0
    checkpoint_every: int = 0

    def __post_init__(self):
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.lr < 0:
            raise ConfigError(f"learning rate must be >= 0, got {self.lr}")
        if self.pae_backend not in PAE_BACKENDS:
            raise ConfigError(f"unknown affinity backend {self.pae_backend!r}")

    @classmethod
    def from_mapping(cls, cfg: dict) -> "TrainConfig":
        """Build from a resolved config document (see :mod:`muxgcl.config`)."""
        aug = cfg["augment"]
        lam = cfg["loss"]["lambda"]
        return cls(
            augment=AugmentConfig(
                edge_drop=(aug["view1"]["edge_drop"], aug["view2"]["edge_drop"]),
                feature_mask=(aug["view1"]["feature_mask"], aug["view2"]["feature_mask"]),
            ),
            hidden=tuple(cfg["encoder"]["hidden"]),
            contrast_dim=cfg["encoder"]["contrast_dim"],
            activation=cfg["encoder"]["activation"],
            tau=cfg["loss"]["tau"],
            lambdas=None if lam is None else tuple(float(x) for x in lam),
            mode=cfg["loss"]["mode"],
            omega_floor=cfg["loss"]["omega_floor"],
            pae_backend=cfg["pae"]["backend"],
            node2vec=Node2VecConfig(dim=cfg["pae"]["dim"], **cfg["pae"]["node2vec"]),
            vgae=VGAEConfig(**cfg["pae"]["vgae"]),
            table_mode=cfg["pae"]["table"],
            memory_budget=cfg["pae"]["memory_budget"],
            epochs=cfg["train"]["epochs"],
            lr=cfg["train"]["lr"],
            weight_decay=cfg["train"]["weight_decay"],
            beta1=cfg["train"]["beta1"],
            beta2=cfg["train"]["beta2"],
            eps=cfg["train"]["eps"],
            seed=cfg["train"]["seed"],
            checkpoint_every=cfg["train"]["checkpoint_every"],
        )


@dataclass
class TrainHistory:
    """Per-epoch loss/timing records plus one-off preprocessing cost."""

    losses: list[float] = field(default_factory=list)
    seconds: list[float] = field(default_factory=list)
    snapshots: list[object] = field(default_factory=list)
    pae_seconds: float = 0.0
    mode: str = "mux"


def _stream(seed: int, label: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([seed, label])


def build_affinity(
    dataset: GraphDataset,
    cfg: TrainConfig,
    cache_path: str | Path | None = None,
):
    """Topology embeddings -> pooled patches -> weight table, once per run.

    Grace mode and ``backend: none`` fall back to unit weights. A cache path
    reuses previously pooled embeddings when the header matches.
    """
    num_hops = len(cfg.hidden)
    if cfg.mode == "grace" or cfg.pae_backend == "none":
        return UnitAffinity(dataset.num_nodes, num_hops)

    h = None
    if cache_path is not None and Path(cache_path).is_file():
        h, backend, seed = load_patch_embeddings(cache_path)
        if (
            h.shape[0] != dataset.num_nodes
            or h.shape[1] != num_hops + 1
            or backend != cfg.pae_backend
            or seed != cfg.seed
        ):
            raise DataError(
                f"cache {cache_path} does not match this run "
                f"(shape {h.shape}, backend {backend}, seed {seed})"
            )
    if h is None:
        rng_seed = _stream(cfg.seed, 0)
        if cfg.pae_backend == "node2vec":
            base = node2vec_embed(dataset, cfg.node2vec, rng_seed)
        else:
            base = vgae_embed(dataset, cfg.vgae, rng_seed)
        h = pool_patches(base, dataset, num_hops)
        if cache_path is not None:
            save_patch_embeddings(cache_path, h, cfg.pae_backend, cfg.seed)
    return materialize(h, cfg.table_mode, cfg.memory_budget, cfg.omega_floor)


def _loss_config(cfg: TrainConfig, affinity) -> LossConfig:
    num_hops = len(cfg.hidden)
    if cfg.lambdas is None:
        lam = uniform_lambdas(num_hops)
    else:
        lam = np.asarray(cfg.lambdas, dtype=np.float64)
    if cfg.mode == "grace":
        lam = onehot_lambdas(num_hops)
    return LossConfig(tau=cfg.tau, lambdas=lam, affinity=affinity, mode=cfg.mode)


def train(
    dataset: GraphDataset,
    cfg: TrainConfig,
    out_dir: str | Path | None = None,
    pae_cache: str | Path | None = None,
    epoch_hook=None,
) -> tuple[EncoderParams, TrainHistory]:
    """Run the full loop; returns final parameters and the history.

    ``epoch_hook(epoch, params)``, when given, may return a snapshot object
    stored in the history (used e.g. for tracking statistics over training).
    Checkpoints land in ``out_dir`` as ``checkpoint_<epoch>.bin`` plus a
    final ``params.bin``.
    """
    from .loss import loss_gradients  # local alias keeps the hot loop tight

    t0 = time.perf_counter()
    affinity = build_affinity(dataset, cfg, pae_cache)
    history = TrainHistory(pae_seconds=time.perf_counter() - t0, mode=cfg.mode)
    loss_cfg = _loss_config(cfg, affinity)

    shape = EncoderShape(
        in_dim=dataset.num_features,
        hidden=cfg.hidden,
        contrast_dim=cfg.contrast_dim,
        activation=cfg.activation,
    )
    params = init_params(shape, _stream(cfg.seed, 1))
    tensors = params.tensors()
    state = AdamState.init(tensors)
    hyper = AdamHyper(cfg.lr, cfg.beta1, cfg.beta2, cfg.eps, cfg.weight_decay)
    aug_rng = np.random.default_rng(_stream(cfg.seed, 2))

    num_hops = len(cfg.hidden)
    eff = loss_cfg.lambdas if cfg.mode != "grace" else onehot_lambdas(num_hops)
    skip_hop = [eff[k] == 0.0 and k != num_hops for k in range(num_hops + 1)]

    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)

    for epoch in range(cfg.epochs):
        tic = time.perf_counter()
        view_u, view_v = make_views(dataset, cfg.augment, aug_rng)
        try:
            emb_u = forward(view_u, params)
            emb_v = forward(view_v, params)
            value, d_zu, d_zv = loss_gradients(emb_u.contrast, emb_v.contrast,
                                               loss_cfg)
        except NumericError as e:
            raise NumericError(f"epoch {epoch}: {e}") from e
        if not np.isfinite(value):
            raise NumericError(f"non-finite loss at epoch {epoch}")
        d_zu = [None if skip_hop[k] else d_zu[k] for k in range(num_hops + 1)]
        d_zv = [None if skip_hop[k] else d_zv[k] for k in range(num_hops + 1)]
        grads = backward(params, emb_u, d_zu)
        backward(params, emb_v, d_zv, grads)
        adam_step(tensors, grads, state, hyper)

        history.losses.append(float(value))
        history.seconds.append(time.perf_counter() - tic)
        if epoch_hook is not None:
            history.snapshots.append(epoch_hook(epoch, params))
        if (
            out is not None
            and cfg.checkpoint_every > 0
            and (epoch + 1) % cfg.checkpoint_every == 0
        ):
            save_params(out / f"checkpoint_{epoch + 1:05d}.bin", params)

    if out is not None:
        save_params(out / "params.bin", params)
    return params, history


def benchmark_epoch(
    dataset: GraphDataset,
    cfg: TrainConfig,
    measure_epochs: int = 20,
    warmup: int = 5,
    pae_cache: str | Path | None = None,
) -> dict[str, float]:
    """Median per-stage wall-clock seconds over measured epochs.

    Stage keys: augment, forward, loss, backward, update, total; plus the
    one-off ``pae_seconds``.
    """
    if measure_epochs < 1:
        raise ConfigError("need at least one measured epoch")
    t0 = time.perf_counter()
    affinity = build_affinity(dataset, cfg, pae_cache)
    pae_seconds = time.perf_counter() - t0
    loss_cfg = _loss_config(cfg, affinity)

    shape = EncoderShape(dataset.num_features, cfg.hidden, cfg.contrast_dim,
                         cfg.activation)
    params = init_params(shape, _stream(cfg.seed, 1))
    tensors = params.tensors()
    state = AdamState.init(tensors)
    hyper = AdamHyper(cfg.lr, cfg.beta1, cfg.beta2, cfg.eps, cfg.weight_decay)
    aug_rng = np.random.default_rng(_stream(cfg.seed, 2))

    from .loss import loss_gradients

    num_hops = len(cfg.hidden)
    stages: dict[str, list[float]] = {
        s: [] for s in ("augment", "forward", "loss", "backward", "update", "total")
    }
    for epoch in range(warmup + measure_epochs):
        marks = [time.perf_counter()]
        view_u, view_v = make_views(dataset, cfg.augment, aug_rng)
        marks.append(time.perf_counter())
        emb_u = forward(view_u, params)
        emb_v = forward(view_v, params)
        marks.append(time.perf_counter())
        _, d_zu, d_zv = loss_gradients(emb_u.contrast, emb_v.contrast, loss_cfg)
        marks.append(time.perf_counter())
        grads = backward(params, emb_u, d_zu)
        backward(params, emb_v, d_zv, grads)
        marks.append(time.perf_counter())
        adam_step(tensors, grads, state, hyper)
        marks.append(time.perf_counter())
        if epoch < warmup:
            continue
        deltas = np.diff(marks)
        for name, dt in zip(("augment", "forward", "loss", "backward", "update"),
                            deltas):
            stages[name].append(float(dt))
        stages["total"].append(float(marks[-1] - marks[0]))

    medians = {name: float(np.median(vals)) for name, vals in stages.items()}
    medians["pae_seconds"] = pae_seconds
    return medians


def history_to_csv(history: TrainHistory, path: str | Path) -> None:
    lines = ["epoch,loss,seconds"]
    for i, (loss_value, secs) in enumerate(zip(history.losses, history.seconds)):
        lines.append(f"{i},{loss_value!r},{secs!r}")
    Path(path).write_text("\n".join(lines) + "\n")
