import json

import numpy as np
import pytest

from muxgcl.datasets import (
    GraphDataset,
    khop_egonet,
    load_dataset,
    normalize_adjacency,
    random_split,
    save_dataset,
)
from muxgcl.errors import DataError

from conftest import build_graph


def write_dataset_dir(tmp_path, meta, edges, features, labels):
    (tmp_path / "meta.json").write_text(json.dumps(meta))
    (tmp_path / "edges.tsv").write_text(
        "".join(f"{u}\t{v}\n" for u, v in edges)
    )
    (tmp_path / "features.tsv").write_text(
        "".join(f"{i}\t{j}\t{v}\n" for i, j, v in features)
    )
    (tmp_path / "labels.tsv").write_text(
        "".join(f"{i}\t{y}\n" for i, y in labels)
    )
    return tmp_path


@pytest.fixture
def triangle_dir(tmp_path):
    return write_dataset_dir(
        tmp_path,
        {"num_nodes": 3, "num_features": 2, "num_classes": 2, "name": "tri"},
        edges=[(0, 1), (1, 2), (0, 2)],
        features=[(0, 0, 1.0), (1, 1, 0.5), (2, 0, -2.25)],
        labels=[(0, 0), (1, 1), (2, 0)],
    )


class TestLoad:
    def test_triangle_counts(self, triangle_dir):
        g = load_dataset(triangle_dir)
        assert (g.num_nodes, g.num_features, g.num_classes) == (3, 2, 2)
        assert g.num_edges == 3
        assert g.name == "tri"

    def test_reversed_duplicate_collapses(self, tmp_path):
        d = write_dataset_dir(
            tmp_path,
            {"num_nodes": 2, "num_features": 1, "num_classes": 1},
            edges=[(0, 1), (1, 0)],
            features=[(0, 0, 1.0)],
            labels=[(0, 0), (1, 0)],
        )
        g = load_dataset(d)
        assert g.num_edges == 1
        assert g.adjacency.nnz == 2

    def test_self_loop_dropped(self, tmp_path, caplog):
        d = write_dataset_dir(
            tmp_path,
            {"num_nodes": 2, "num_features": 1, "num_classes": 1},
            edges=[(0, 1), (1, 1)],
            features=[],
            labels=[(0, 0), (1, 0)],
        )
        with caplog.at_level("WARNING"):
            g = load_dataset(d)
        assert g.num_edges == 1
        assert g.adjacency.diagonal().sum() == 0
        assert any("self-loop" in r.message for r in caplog.records)

    @pytest.mark.parametrize(
        "mutate, fragment",
        [
            (lambda d: (d / "edges.tsv").write_text("0\t9\n"), "out of range"),
            (lambda d: (d / "labels.tsv").write_text("0\t5\n1\t0\n2\t0\n"), "label out of range"),
            (lambda d: (d / "features.tsv").write_text("0\t0\tnan\n"), "non-finite"),
            (lambda d: (d / "meta.json").unlink(), "missing file"),
            (lambda d: (d / "labels.tsv").write_text("0\t0\n2\t0\n"), "missing labels"),
        ],
    )
    def test_malformed_inputs(self, triangle_dir, mutate, fragment):
        mutate(triangle_dir)
        with pytest.raises(DataError, match=fragment):
            load_dataset(triangle_dir)

    def test_error_carries_file_and_line(self, triangle_dir):
        (triangle_dir / "edges.tsv").write_text("0\t1\n0\t9\n")
        with pytest.raises(DataError, match=r"edges\.tsv:2"):
            load_dataset(triangle_dir)


class TestRoundTrip:
    def test_load_save_load_bit_exact(self, triangle_dir, tmp_path):
        g1 = load_dataset(triangle_dir)
        out = tmp_path / "copy"
        save_dataset(g1, out)
        g2 = load_dataset(out)
        assert np.array_equal(g1.features, g2.features)
        assert np.array_equal(g1.labels, g2.labels)
        assert (g1.adjacency != g2.adjacency).nnz == 0
        # Saving again reproduces the files byte for byte.
        out2 = tmp_path / "copy2"
        save_dataset(g2, out2)
        for name in ("meta.json", "edges.tsv", "features.tsv", "labels.tsv"):
            assert (out / name).read_bytes() == (out2 / name).read_bytes()


class TestNormalize:
    def test_triangle_all_entries_one_third(self, triangle):
        a = normalize_adjacency(triangle.adjacency)
        dense = a.toarray()
        # Every node has degree 2 + self-loop -> D_ii = 3 everywhere.
        assert np.allclose(dense, np.full((3, 3), 1.0 / 3.0))

    def test_two_node_path_values(self, two_path):
        dense = normalize_adjacency(two_path.adjacency).toarray()
        assert np.allclose(dense, np.full((2, 2), 0.5))

    def test_isolated_node_identity_row(self):
        g = build_graph(3, [(0, 1)])
        dense = normalize_adjacency(g.adjacency).toarray()
        assert dense[2, 2] == 1.0
        assert np.count_nonzero(dense[2]) == 1

    def test_symmetry_and_range(self):
        g = build_graph(30, [(i, (i * 7 + 1) % 30) for i in range(30)], seed=3)
        a = normalize_adjacency(g.adjacency)
        assert (abs(a - a.T) > 0).nnz == 0
        assert (a.data > 0).all() and (a.data <= 1).all()

    def test_support_is_edges_plus_diagonal(self, triangle):
        a = normalize_adjacency(triangle.adjacency)
        expected = triangle.adjacency.toarray() + np.eye(3)
        assert np.array_equal(a.toarray() != 0, expected != 0)


class TestSplit:
    def test_exact_small_sizes(self):
        s = random_split(10, (0.1, 0.1, 0.8), seed=7)
        assert (len(s.train), len(s.val), len(s.test)) == (1, 1, 8)

    def test_deterministic(self):
        a = random_split(100, (0.2, 0.3, 0.5), seed=5)
        b = random_split(100, (0.2, 0.3, 0.5), seed=5)
        assert np.array_equal(a.train, b.train)
        assert np.array_equal(a.test, b.test)

    def test_cora_scale_rounding(self):
        s = random_split(2708, (0.1, 0.1, 0.8), seed=0)
        assert (len(s.train), len(s.val), len(s.test)) == (270, 270, 2168)

    def test_partition_property(self):
        for seed in range(5):
            s = random_split(57, (0.25, 0.25, 0.5), seed=seed)
            merged = np.concatenate([s.train, s.val, s.test])
            assert np.array_equal(np.sort(merged), np.arange(57))

    def test_too_small_rejected(self):
        with pytest.raises(DataError):
            random_split(2, (0.1, 0.1, 0.8), seed=0)

    def test_bad_fractions_rejected(self):
        with pytest.raises(DataError):
            random_split(10, (0.5, 0.5, 0.5), seed=0)


class TestEgonet:
    def test_zero_hops_is_anchor(self, triangle):
        assert khop_egonet(triangle, 1, 0).tolist() == [1]

    def test_path_one_hop(self):
        g = build_graph(3, [(0, 1), (1, 2)])
        assert khop_egonet(g, 0, 1).tolist() == [0, 1]

    def test_triangle_two_hops_full(self, triangle):
        assert khop_egonet(triangle, 0, 2).tolist() == [0, 1, 2]

    def test_monotone_in_k_and_component_limit(self):
        g = build_graph(
            12, [(i, i + 1) for i in range(7)] + [(9, 10), (10, 11)], seed=2
        )
        prev = set()
        for k in range(9):
            cur = set(khop_egonet(g, 3, k).tolist())
            assert prev <= cur
            prev = cur
        assert prev == set(range(8))  # component of node 3 only


class TestValidation:
    def test_asymmetric_adjacency_rejected(self, triangle):
        broken = triangle.adjacency.tolil()
        broken[0, 1] = 0
        bad = GraphDataset(
            name="bad",
            num_nodes=3,
            num_features=triangle.num_features,
            num_classes=triangle.num_classes,
            adjacency=broken.tocsr(),
            features=triangle.features,
            labels=triangle.labels,
        )
        with pytest.raises(DataError, match="symmetric"):
            bad.validate()
