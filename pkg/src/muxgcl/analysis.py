"""Diagnostics on trained checkpoints.

Two views of the same graph are drawn, projected, and compared:

* similarity histograms: cosine distributions of matching-node (positive)
  versus mismatched-node (negative) pairs for every layer combination;
* T statistics: per-triple quantities contrasting a cross-hop weighted
  negative term against its same-hop unweighted counterpart,

      psi_same(i,j,k)  = cos(a_i, u_j_k) - cos(a_i, v_i_k)
      psi_cross(i,j,k) = cos(a_i, v_j_k) - cos(a_i, v_i_k)
      T(i,j,k) = psi(i,j,k) - psi(i,j,L) + log w_ijk

  with a_i the anchor's final-hop vector. Their empirical distributions are
  summarized by moment-matched Gaussians and the fraction of positive
  samples.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .augment import AugmentConfig, make_views
from .datasets import GraphDataset
from .encoder import EncoderParams, forward
from .errors import DataError

MAX_SAMPLED_TRIPLES = 1_000_000


@dataclass(frozen=True)
class GaussianFit:
    """Moment-matched normal summary of a sample."""

    mean: float
    std: float
    count: int
    frac_positive: float
    lower95: float

    @classmethod
    def from_samples(cls, samples: np.ndarray) -> "GaussianFit":
        if samples.size == 0:
            raise DataError("cannot fit a distribution to an empty sample set")
        mean = float(samples.mean())
        std = float(samples.std())
        return cls(
            mean=mean,
            std=std,
            count=int(samples.size),
            frac_positive=float((samples > 0).mean()),
            lower95=mean - 1.645 * std,
        )


@dataclass(frozen=True)
class SimilarityHistogram:
    layer_u: int
    layer_v: int
    bin_edges: np.ndarray
    pos_density: np.ndarray
    neg_density: np.ndarray
    pos_median: float
    neg_median: float


def _unit(z: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(z, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return z / norms


def project_views(
    dataset: GraphDataset,
    params: EncoderParams,
    augment: AugmentConfig,
    seed: int,
) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Contrast stacks of one seeded pair of corrupted views."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, 2]))
    view_u, view_v = make_views(dataset, augment, rng)
    return (
        [_unit(z) for z in forward(view_u, params).contrast],
        [_unit(z) for z in forward(view_v, params).contrast],
    )


def similarity_histograms(
    dataset: GraphDataset,
    params: EncoderParams,
    augment: AugmentConfig,
    seed: int = 0,
    layer_pairs=None,
    bins: int = 60,
    neg_samples: int = 100_000,
) -> list[SimilarityHistogram]:
    """Positive/negative cosine histograms for each layer pair."""
    zu, zv = project_views(dataset, params, augment, seed)
    hops = len(zu) - 1
    if layer_pairs is None:
        layer_pairs = [(m, n) for m in range(hops + 1) for n in range(hops + 1)]
    n = dataset.num_nodes
    rng = np.random.default_rng(seed)
    out = []
    for m, k in layer_pairs:
        pos = np.sum(zu[m] * zv[k], axis=1)
        count = min(neg_samples, MAX_SAMPLED_TRIPLES)
        ii = rng.integers(0, n, size=count)
        jj = rng.integers(0, n - 1, size=count)
        jj[jj >= ii] += 1  # uniform over j != i
        neg = np.sum(zu[m][ii] * zv[k][jj], axis=1)
        pos_d, edges = np.histogram(pos, bins=bins, range=(-1.0, 1.0), density=True)
        neg_d, _ = np.histogram(neg, bins=bins, range=(-1.0, 1.0), density=True)
        out.append(
            SimilarityHistogram(
                layer_u=m,
                layer_v=k,
                bin_edges=edges,
                pos_density=pos_d,
                neg_density=neg_d,
                pos_median=float(np.median(pos)),
                neg_median=float(np.median(neg)),
            )
        )
    return out


def t_samples(
    zu: list[np.ndarray],
    zv: list[np.ndarray],
    ii: np.ndarray,
    jj: np.ndarray,
    kk: np.ndarray,
    affinity,
) -> tuple[np.ndarray, np.ndarray]:
    """T values for explicit (anchor, other, hop) triples.

    The stacks must already be row-normalized (as returned by
    :func:`project_views`).
    """
    hops = len(zu) - 1
    anchors = zu[hops][ii]
    pos_final = np.sum(anchors * zv[hops][ii], axis=1)
    t_s = np.empty(ii.shape[0])
    t_d = np.empty(ii.shape[0])
    for hop in np.unique(kk):
        sel = kk == hop
        a = anchors[sel]
        i_sel, j_sel = ii[sel], jj[sel]
        pos_k = np.sum(a * zv[hop][i_sel], axis=1)
        psi_s_k = np.sum(a * zu[hop][j_sel], axis=1) - pos_k
        psi_d_k = np.sum(a * zv[hop][j_sel], axis=1) - pos_k
        psi_s_l = np.sum(a * zu[hops][j_sel], axis=1) - pos_final[sel]
        psi_d_l = np.sum(a * zv[hops][j_sel], axis=1) - pos_final[sel]
        logw = np.log(affinity.omega_pairs(int(hop), i_sel, j_sel).astype(np.float64))
        t_s[sel] = psi_s_k - psi_s_l + logw
        t_d[sel] = psi_d_k - psi_d_l + logw
    return t_s, t_d


def t_statistics(
    dataset: GraphDataset,
    params: EncoderParams,
    affinity,
    augment: AugmentConfig,
    sample_count: int = 200_000,
    seed: int = 0,
) -> dict[str, object]:
    """Sampled T statistics with Gaussian summaries.

    Triples (i, j != i, k < L) are drawn uniformly; the total is capped at
    one million for tractability on large graphs.
    """
    zu, zv = project_views(dataset, params, augment, seed)
    hops = len(zu) - 1
    n = dataset.num_nodes
    count = min(sample_count, MAX_SAMPLED_TRIPLES)
    rng = np.random.default_rng(seed)
    ii = rng.integers(0, n, size=count)
    jj = rng.integers(0, n - 1, size=count)
    jj[jj >= ii] += 1
    kk = rng.integers(0, hops, size=count)
    t_s, t_d = t_samples(zu, zv, ii, jj, kk, affinity)
    return {
        "t_s": t_s,
        "t_d": t_d,
        "fit_s": GaussianFit.from_samples(t_s),
        "fit_d": GaussianFit.from_samples(t_d),
    }


def export_histograms(hists: list[SimilarityHistogram], out_dir: str | Path) -> list[Path]:
    """One CSV per layer pair: bin edges plus both densities."""
    if not hists:
        raise DataError("no histograms to export")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for h in hists:
        path = out / f"similarity_u{h.layer_u}_v{h.layer_v}.csv"
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["bin_left", "bin_right", "pos_density", "neg_density"])
            for b in range(h.pos_density.shape[0]):
                writer.writerow(
                    [
                        repr(float(h.bin_edges[b])),
                        repr(float(h.bin_edges[b + 1])),
                        repr(float(h.pos_density[b])),
                        repr(float(h.neg_density[b])),
                    ]
                )
        written.append(path)
    return written


def export_fits(fits: dict[str, GaussianFit], path: str | Path) -> Path:
    """Fit parameters, one row per statistic, stable column order."""
    if not fits:
        raise DataError("no fits to export")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["statistic", "mean", "std", "count", "frac_positive", "lower95"])
        for name in sorted(fits):
            f = fits[name]
            writer.writerow(
                [name, repr(f.mean), repr(f.std), f.count,
                 repr(f.frac_positive), repr(f.lower95)]
            )
    return path
