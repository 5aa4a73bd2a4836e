"""Multi-layer GCN encoder with exact reverse-mode gradients.

The forward pass keeps every intermediate representation: layer k applies
``U_k = act(A_norm @ U_{k-1} @ W_k)`` starting from the (masked) feature
matrix, and each ``U_k`` is additionally projected into a shared contrast
space via a per-layer linear map followed by one shared two-layer ELU head.

``backward`` accumulates analytic gradients for all weights by reverse
accumulation through the head, the projections, the activation and the
sparse adjacency product; the test suite checks every parameter against
central finite differences.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .augment import GraphView
from .errors import DataError, NumericError

_MAGIC = b"MGCL"
_FORMAT_VERSION = 1
_ACTIVATIONS = ("relu", "identity")


@dataclass(frozen=True)
class EncoderShape:
    """Width chain of the encoder: input, hidden layers, contrast space."""

    in_dim: int
    hidden: tuple[int, ...] = (128, 128)
    contrast_dim: int = 128
    activation: str = "relu"

    def __post_init__(self):
        if self.activation not in _ACTIVATIONS:
            raise DataError(f"unknown activation {self.activation!r}")
        if self.in_dim < 1 or self.contrast_dim < 1 or len(self.hidden) < 1:
            raise DataError("encoder widths must be positive")

    @property
    def num_layers(self) -> int:
        return len(self.hidden)

    @property
    def layer_widths(self) -> tuple[int, ...]:
        """Width of U_k for k = 0..L."""
        return (self.in_dim, *self.hidden)


@dataclass
class EncoderParams:
    """All trainable tensors, keyed in fixed declaration order.

    ``weights[k]`` maps layer k to k+1; ``proj[k]`` maps layer k into the
    contrast space; the two head matrices (with biases) are shared by every
    layer's projection.
    """

    weights: list[np.ndarray]
    proj: list[np.ndarray]
    head_w1: np.ndarray
    head_b1: np.ndarray
    head_w2: np.ndarray
    head_b2: np.ndarray
    activation: str = "relu"

    @property
    def num_layers(self) -> int:
        return len(self.weights)

    def tensor_items(self) -> list[tuple[str, np.ndarray]]:
        items = [(f"w{k + 1}", w) for k, w in enumerate(self.weights)]
        items += [(f"p{k}", p) for k, p in enumerate(self.proj)]
        items += [
            ("head_w1", self.head_w1),
            ("head_b1", self.head_b1),
            ("head_w2", self.head_w2),
            ("head_b2", self.head_b2),
        ]
        return items

    def tensors(self) -> dict[str, np.ndarray]:
        return dict(self.tensor_items())

    def copy(self) -> "EncoderParams":
        return EncoderParams(
            weights=[w.copy() for w in self.weights],
            proj=[p.copy() for p in self.proj],
            head_w1=self.head_w1.copy(),
            head_b1=self.head_b1.copy(),
            head_w2=self.head_w2.copy(),
            head_b2=self.head_b2.copy(),
            activation=self.activation,
        )


@dataclass
class LayerEmbeddings:
    """Per-layer representations of one view plus the caches backward needs.

    ``layers[k]`` is U_k (``layers[0]`` is the view's feature matrix) and
    ``contrast[k]`` the head output Z_k used by the loss.
    """

    layers: list[np.ndarray]
    contrast: list[np.ndarray]
    adjacency: sp.csr_matrix = field(repr=False)
    pre_activations: list[np.ndarray] = field(repr=False)
    agg_inputs: list[np.ndarray] = field(repr=False)
    proj_out: list[np.ndarray] = field(repr=False)
    head_pre: list[np.ndarray] = field(repr=False)
    head_mid: list[np.ndarray] = field(repr=False)


def glorot(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=(fan_in, fan_out))


def init_params(shape: EncoderShape, seed: int) -> EncoderParams:
    """Glorot-uniform weights; deterministic per seed.

    Head biases start uniform within +-1/sqrt(width) rather than at zero so
    the head output of an all-zero row (a node whose every feature column
    was masked) is still a usable nonzero vector at epoch 0.
    """
    rng = np.random.default_rng(seed)
    widths = shape.layer_widths
    weights = [glorot(rng, widths[k], widths[k + 1]) for k in range(shape.num_layers)]
    proj = [glorot(rng, widths[k], shape.contrast_dim) for k in range(shape.num_layers + 1)]
    dc = shape.contrast_dim
    b_bound = 1.0 / np.sqrt(dc)
    return EncoderParams(
        weights=weights,
        proj=proj,
        head_w1=glorot(rng, dc, dc),
        head_b1=rng.uniform(-b_bound, b_bound, size=dc),
        head_w2=glorot(rng, dc, dc),
        head_b2=rng.uniform(-b_bound, b_bound, size=dc),
        activation=shape.activation,
    )


def _act(x: np.ndarray, kind: str) -> np.ndarray:
    return np.maximum(x, 0.0) if kind == "relu" else x


def _act_prime(pre: np.ndarray, kind: str) -> np.ndarray | float:
    return (pre > 0.0).astype(pre.dtype) if kind == "relu" else 1.0


def _elu(x: np.ndarray) -> np.ndarray:
    return np.where(x > 0.0, x, np.expm1(np.minimum(x, 0.0)))


def _elu_prime(x: np.ndarray) -> np.ndarray:
    return np.where(x > 0.0, 1.0, np.exp(np.minimum(x, 0.0)))


def forward(view: GraphView, params: EncoderParams) -> LayerEmbeddings:
    """Run the full encoder on one view, retaining all intermediates."""
    x = view.features
    widths_ok = params.weights[0].shape[0] == x.shape[1]
    if not widths_ok:
        raise DataError(
            f"feature width {x.shape[1]} != encoder input width "
            f"{params.weights[0].shape[0]}"
        )
    a_norm = view.adjacency
    layers = [x]
    pres: list[np.ndarray] = []
    aggs: list[np.ndarray] = []
    for k, w in enumerate(params.weights, start=1):
        agg = a_norm @ layers[-1]
        pre = agg @ w
        u = _act(pre, params.activation)
        if not np.isfinite(u).all():
            raise NumericError(f"non-finite value in encoder layer {k}")
        aggs.append(agg)
        pres.append(pre)
        layers.append(u)

    contrast: list[np.ndarray] = []
    proj_out: list[np.ndarray] = []
    head_pre: list[np.ndarray] = []
    head_mid: list[np.ndarray] = []
    for k, p in enumerate(params.proj):
        y = layers[k] @ p
        t = y @ params.head_w1 + params.head_b1
        m = _elu(t)
        z = m @ params.head_w2 + params.head_b2
        if not np.isfinite(z).all():
            raise NumericError(f"non-finite value in contrast projection {k}")
        proj_out.append(y)
        head_pre.append(t)
        head_mid.append(m)
        contrast.append(z)

    return LayerEmbeddings(
        layers=layers,
        contrast=contrast,
        adjacency=a_norm,
        pre_activations=pres,
        agg_inputs=aggs,
        proj_out=proj_out,
        head_pre=head_pre,
        head_mid=head_mid,
    )


def zero_grads(params: EncoderParams) -> dict[str, np.ndarray]:
    return {name: np.zeros_like(t) for name, t in params.tensor_items()}


def backward(
    params: EncoderParams,
    emb: LayerEmbeddings,
    d_contrast: list[np.ndarray | None],
    grads: dict[str, np.ndarray] | None = None,
) -> dict[str, np.ndarray]:
    """Accumulate parameter gradients given upstream gradients at every Z_k.

    ``d_contrast[k]`` may be None for layers the loss did not touch. Pass an
    existing ``grads`` dict to accumulate across views; a fresh dict is
    created otherwise.
    """
    if len(d_contrast) != len(params.proj):
        raise DataError(
            f"expected {len(params.proj)} upstream gradients, got {len(d_contrast)}"
        )
    if grads is None:
        grads = zero_grads(params)

    n_layers = params.num_layers
    d_layers: list[np.ndarray | None] = [None] * (n_layers + 1)

    for k, dz in enumerate(d_contrast):
        if dz is None:
            continue
        m = emb.head_mid[k]
        grads["head_w2"] += m.T @ dz
        grads["head_b2"] += dz.sum(axis=0)
        dm = dz @ params.head_w2.T
        dt = dm * _elu_prime(emb.head_pre[k])
        grads["head_w1"] += emb.proj_out[k].T @ dt
        grads["head_b1"] += dt.sum(axis=0)
        dy = dt @ params.head_w1.T
        grads[f"p{k}"] += emb.layers[k].T @ dy
        du = dy @ params.proj[k].T
        d_layers[k] = du if d_layers[k] is None else d_layers[k] + du

    a_norm = emb.adjacency
    for k in range(n_layers, 0, -1):
        du = d_layers[k]
        if du is None:
            continue
        d_pre = du * _act_prime(emb.pre_activations[k - 1], params.activation)
        grads[f"w{k}"] += emb.agg_inputs[k - 1].T @ d_pre
        d_prev = a_norm @ (d_pre @ params.weights[k - 1].T)
        d_layers[k - 1] = (
            d_prev if d_layers[k - 1] is None else d_layers[k - 1] + d_prev
        )
    return grads


def save_params(path: str | Path, params: EncoderParams) -> None:
    """Write a little-endian binary checkpoint (float32 tensors)."""
    items = params.tensor_items()
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<IIB", _FORMAT_VERSION, params.num_layers,
                             _ACTIVATIONS.index(params.activation)))
        fh.write(struct.pack("<I", len(items)))
        for _, t in items:
            fh.write(struct.pack("<I", t.ndim))
            fh.write(struct.pack(f"<{t.ndim}I", *t.shape))
        for _, t in items:
            fh.write(np.ascontiguousarray(t, dtype="<f4").tobytes())


def load_params(path: str | Path) -> EncoderParams:
    """Read a checkpoint written by :func:`save_params`."""
    raw = Path(path).read_bytes()
    if raw[:4] != _MAGIC:
        raise DataError("not a checkpoint file (bad magic)", path=path)
    off = 4
    version, n_layers, act_code = struct.unpack_from("<IIB", raw, off)
    off += 9
    if version != _FORMAT_VERSION:
        raise DataError(f"unsupported checkpoint version {version}", path=path)
    (n_tensors,) = struct.unpack_from("<I", raw, off)
    off += 4
    shapes = []
    for _ in range(n_tensors):
        (ndim,) = struct.unpack_from("<I", raw, off)
        off += 4
        shape = struct.unpack_from(f"<{ndim}I", raw, off)
        off += 4 * ndim
        shapes.append(shape)
    tensors = []
    for shape in shapes:
        count = int(np.prod(shape)) if shape else 1
        t = np.frombuffer(raw, dtype="<f4", count=count, offset=off)
        off += 4 * count
        tensors.append(t.reshape(shape).astype(np.float64))
    if n_tensors != 2 * n_layers + 5:
        raise DataError(f"tensor count {n_tensors} inconsistent with L={n_layers}",
                        path=path)
    weights = tensors[:n_layers]
    proj = tensors[n_layers : 2 * n_layers + 1]
    head = tensors[2 * n_layers + 1 :]
    return EncoderParams(
        weights=weights,
        proj=proj,
        head_w1=head[0],
        head_b1=head[1],
        head_w2=head[2],
        head_b2=head[3],
        activation=_ACTIVATIONS[act_code],
    )
