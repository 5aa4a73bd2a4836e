import numpy as np
import pytest

from muxgcl.errors import ConfigError, DataError
from muxgcl.pae.affinity import (
    AffinityTable,
    UnitAffinity,
    default_omega_floor,
    load_patch_embeddings,
    materialize,
    patch_weight,
    pool_patches,
    save_patch_embeddings,
)
from muxgcl.pae.node2vec import Node2VecConfig, node2vec_embed

from conftest import build_graph


def pooled(seed, n=12, d=6, hops=2):
    rng = np.random.default_rng(seed)
    edges = [(i, (i + 1) % n) for i in range(n)]
    g = build_graph(n, edges, num_features=3, seed=seed)
    h0 = rng.normal(size=(n, d))
    return pool_patches(h0, g, hops), g, h0


class TestPooling:
    def test_hop_zero_is_normalized_base(self):
        h, _, h0 = pooled(0)
        expected = h0 / np.linalg.norm(h0, axis=1, keepdims=True)
        assert np.allclose(h[:, 0, :], expected)

    def test_rows_unit_norm(self):
        h, _, _ = pooled(1)
        norms = np.linalg.norm(h, axis=2)
        assert np.allclose(norms, 1.0, atol=1e-6)

    def test_star_center_pools_everything(self):
        g = build_graph(5, [(0, i) for i in range(1, 5)])
        rng = np.random.default_rng(2)
        h0 = rng.normal(size=(5, 4))
        h = pool_patches(h0, g, 1)
        mean_all = h0.mean(axis=0)
        assert np.allclose(h[0, 1], mean_all / np.linalg.norm(mean_all))

    def test_identical_base_gives_identical_patches(self):
        g = build_graph(6, [(i, (i + 1) % 6) for i in range(6)])
        h0 = np.tile(np.array([1.0, 2.0, 2.0]), (6, 1))
        h = pool_patches(h0, g, 2)
        assert np.allclose(h, h[0, 0][None, None, :])


class TestWeight:
    def test_identical_patches_hit_floor(self):
        h = np.zeros((2, 2, 3))
        h[:, :, 0] = 1.0
        assert patch_weight(h, 0, 1, 0, floor=0.02) == 0.02

    def test_orthogonal_patches_full_weight(self):
        h = np.zeros((2, 2, 3))
        h[0, :, 0] = 1.0
        h[1, :, 1] = 1.0
        assert patch_weight(h, 0, 1, 1, floor=0.02) == 1.0

    def test_negative_similarity_clamped(self):
        h = np.zeros((2, 2, 2))
        h[0, :, :] = [1.0, 0.0]
        h[1, :, :] = [-0.5, np.sqrt(3) / 2]
        assert patch_weight(h, 0, 1, 0, floor=0.02) == 1.0

    def test_self_pair_rejected(self):
        h = np.zeros((2, 2, 2))
        with pytest.raises(DataError):
            patch_weight(h, 1, 1, 0, floor=0.02)

    def test_default_floor(self):
        assert default_omega_floor(10) == 0.2
        assert default_omega_floor(10_000) == 1e-2


class TestTable:
    def test_precompute_fits_budget(self):
        h, _, _ = pooled(3, n=100)
        table = materialize(h, mode="auto", memory_budget=1 << 30)
        assert table.mode == "precompute"
        assert len(table._mats) == 3

    def test_over_budget_falls_back_or_errors(self):
        h, _, _ = pooled(4, n=50)
        auto = materialize(h, mode="auto", memory_budget=10)
        assert auto.mode == "lazy"
        with pytest.raises(ConfigError):
            materialize(h, mode="precompute", memory_budget=10)

    def test_modes_identical(self):
        h, _, _ = pooled(5, n=40)
        pre = materialize(h, mode="precompute")
        lazy = materialize(h, mode="lazy")
        for k in range(3):
            assert np.array_equal(pre.omega(k), lazy.omega(k))
            rows = np.array([0, 7, 31])
            assert np.array_equal(pre.omega(k, rows), lazy.omega(k, rows))
            ii = np.array([0, 3, 9])
            jj = np.array([1, 8, 2])
            assert np.array_equal(pre.omega_pairs(k, ii, jj),
                                  lazy.omega_pairs(k, ii, jj))

    def test_bounds(self):
        h, _, _ = pooled(6, n=30)
        table = materialize(h, floor=0.05)
        for k in range(3):
            w = table.omega(k)
            off_diag = w[~np.eye(30, dtype=bool)]
            assert (off_diag >= np.float32(0.05)).all()
            assert (off_diag <= 1.0).all()

    def test_log_consistent_with_omega(self):
        h, _, _ = pooled(7, n=20)
        table = materialize(h)
        assert np.allclose(table.log_omega(1),
                           np.log(table.omega(1).astype(np.float64)))

    def test_unit_affinity(self):
        unit = UnitAffinity(8, 2)
        assert np.array_equal(unit.omega(0), np.ones((8, 8), dtype=np.float32))
        assert np.array_equal(unit.log_omega(1), np.zeros((8, 8)))
        assert np.array_equal(unit.omega_pairs(2, np.array([1]), np.array([2])),
                              np.ones(1, dtype=np.float32))


class TestBarbellOrdering:
    def test_anchor_downweights_own_clique(self):
        # Two 8-cliques joined by one bridge edge: for an anchor inside a
        # clique the weights toward its own clique must be smaller (more
        # likely false negatives) than toward the far clique.
        edges = [(i, j) for i in range(8) for j in range(i + 1, 8)]
        edges += [(i, j) for i in range(8, 16) for j in range(i + 1, 16)]
        edges += [(7, 8)]
        g = build_graph(16, edges, num_classes=2,
                        labels=np.repeat([0, 1], 8))
        cfg = Node2VecConfig(dim=16, walks_per_node=12, walk_length=20,
                             window=4, negatives=3, epochs=4, batch_pairs=512)
        h0 = node2vec_embed(g, cfg, seed=9)
        h = pool_patches(h0, g, 2)
        table = materialize(h, floor=0.01)
        w = table.omega(2)
        anchor = 2
        own = [j for j in range(8) if j != anchor]
        far = list(range(8, 16))
        assert w[anchor, own].mean() < w[anchor, far].mean()


class TestCache:
    def test_round_trip(self, tmp_path):
        h, _, _ = pooled(8, n=9, d=4)
        path = tmp_path / "patches.bin"
        save_patch_embeddings(path, h, backend="vgae", seed=123)
        h2, backend, seed = load_patch_embeddings(path)
        assert np.array_equal(h, h2)
        assert backend == "vgae"
        assert seed == 123

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "bad.bin"
        path.write_bytes(b"????" + b"\x00" * 32)
        with pytest.raises(DataError):
            load_patch_embeddings(path)
