import itertools
import json

import numpy as np
import pytest

from muxgcl.augment import AugmentConfig
from muxgcl.encoder import EncoderShape, init_params
from muxgcl.evaluation import (
    KMeans,
    LogisticRegressionGD,
    accuracy,
    ari,
    embed_clean,
    evaluate_classification,
    evaluate_clustering,
    nmi,
)
from muxgcl.synthetic import make_synthetic_graph

from fakes import all_partitions, ari_reference, nmi_reference


class TestLogReg:
    def test_separable_points_perfect_training_accuracy(self):
        x = np.array([[1.0, 0.0], [-1.0, 0.0]])
        y = np.array([0, 1])
        clf = LogisticRegressionGD(l2=1e-4).fit(x, y)
        assert accuracy(y, clf.predict(x)) == 1.0

    def test_huge_penalty_collapses_weights(self):
        rng = np.random.default_rng(0)
        x = rng.normal(size=(30, 4))
        y = rng.integers(0, 3, size=30)
        clf = LogisticRegressionGD(l2=1e9).fit(x, y)
        assert np.abs(clf.coef_).max() < 1e-6
        # At the limit (weights exactly zero) every logit ties and argmax
        # falls back to the lowest class index.
        clf.coef_[:] = 0.0
        assert (clf.predict(x) == 0).all()

    def test_matches_grid_searched_separator(self):
        # 2-D blobs: brute-force the best linear separator through the
        # origin over angles and compare training accuracies.
        rng = np.random.default_rng(1)
        x = np.concatenate([
            rng.normal(loc=(2.0, 0.5), scale=0.8, size=(10, 2)),
            rng.normal(loc=(-2.0, -0.5), scale=0.8, size=(10, 2)),
        ])
        y = np.repeat([0, 1], 10)
        clf = LogisticRegressionGD(l2=1e-3).fit(x, y)
        ours = accuracy(y, clf.predict(x))

        best = 0.0
        for angle in np.linspace(0, np.pi, 720, endpoint=False):
            w = np.array([np.cos(angle), np.sin(angle)])
            proj = x @ w
            pred = (proj < 0).astype(int)
            best = max(best, accuracy(y, pred), accuracy(y, 1 - pred))
        assert ours >= best - 0.05

    def test_missing_class_warns_but_predicts(self):
        x = np.array([[1.0], [2.0], [-1.0]])
        y = np.array([0, 0, 2])
        with pytest.warns(UserWarning, match="absent"):
            clf = LogisticRegressionGD(l2=1e-3, n_classes=3).fit(x, y)
        assert clf.predict(x).shape == (3,)
        assert set(clf.predict(x)) <= {0, 1, 2}

    def test_deterministic(self):
        rng = np.random.default_rng(2)
        x = rng.normal(size=(40, 6))
        y = rng.integers(0, 4, size=40)
        a = LogisticRegressionGD(l2=0.01).fit(x, y).coef_
        b = LogisticRegressionGD(l2=0.01).fit(x, y).coef_
        assert np.array_equal(a, b)

    def test_gradient_norm_convergence(self):
        rng = np.random.default_rng(3)
        x = rng.normal(size=(50, 5))
        y = rng.integers(0, 3, size=50)
        clf = LogisticRegressionGD(l2=0.1, tol=1e-5).fit(x, y)
        m = x.shape[0]
        onehot = np.zeros((m, 3))
        onehot[np.arange(m), y] = 1.0
        logits = x @ clf.coef_
        probs = np.exp(logits - logits.max(axis=1, keepdims=True))
        probs /= probs.sum(axis=1, keepdims=True)
        grad = x.T @ (probs - onehot) / m + 0.1 * clf.coef_
        assert np.linalg.norm(grad) < 1e-5


class TestAccuracy:
    def test_all_correct(self):
        assert accuracy([1, 2, 3], [1, 2, 3]) == 1.0

    def test_all_flipped_binary(self):
        assert accuracy([0, 1, 0], [1, 0, 1]) == 0.0

    def test_hand_counted_fraction(self):
        truth = np.array([0, 1, 1, 0, 2, 2, 1, 0])
        pred = np.array([0, 1, 0, 0, 2, 1, 2, 0])
        assert accuracy(truth, pred) == 5 / 8


class TestKMeans:
    def test_single_cluster_centroid_is_mean(self):
        rng = np.random.default_rng(4)
        x = rng.normal(size=(15, 3))
        km = KMeans(n_clusters=1, seed=0).fit(x)
        assert (km.labels_ == 0).all()
        assert np.allclose(km.cluster_centers_[0], x.mean(axis=0))

    def test_two_separated_pairs(self):
        x = np.array([[0.0, 0.0], [0.1, 0.0], [10.0, 10.0], [10.1, 10.0]])
        labels = KMeans(n_clusters=2, seed=1).fit_predict(x)
        assert labels[0] == labels[1]
        assert labels[2] == labels[3]
        assert labels[0] != labels[2]

    def test_inertia_close_to_multi_restart_best(self):
        rng = np.random.default_rng(5)
        x = np.concatenate([
            rng.normal(loc=(0, 0), scale=0.3, size=(4, 2)),
            rng.normal(loc=(5, 0), scale=0.3, size=(4, 2)),
            rng.normal(loc=(0, 5), scale=0.3, size=(4, 2)),
        ])
        best = min(KMeans(n_clusters=3, seed=s).fit(x).inertia_
                   for s in range(50))
        ours = KMeans(n_clusters=3, seed=0).fit(x).inertia_
        assert ours <= best * 1.01

    def test_exactly_k_clusters_survive(self):
        # Fewer distinct points than would naturally fill k clusters
        # exercises the empty-cluster reseeding path.
        x = np.array([[0.0, 0.0]] * 6 + [[8.0, 8.0]] * 2 + [[0.0, 8.0]])
        labels = KMeans(n_clusters=3, seed=2).fit_predict(x)
        assert len(set(labels.tolist())) == 3

    def test_deterministic_per_seed(self):
        rng = np.random.default_rng(6)
        x = rng.normal(size=(30, 4))
        a = KMeans(n_clusters=4, seed=3).fit_predict(x)
        b = KMeans(n_clusters=4, seed=3).fit_predict(x)
        assert np.array_equal(a, b)


class TestPartitionMetrics:
    def test_identical_partitions(self):
        y = [0, 0, 1, 2, 1]
        assert nmi(y, y) == pytest.approx(1.0)
        assert ari(y, y) == pytest.approx(1.0)

    def test_single_cluster_prediction_zero_nmi(self):
        assert nmi([0, 0, 1, 1], [0, 0, 0, 0]) == 0.0

    def test_relabeling_invariance(self):
        truth = [0, 0, 1, 1, 2, 2]
        pred = [2, 2, 0, 0, 1, 1]
        assert nmi(truth, pred) == pytest.approx(1.0)
        assert ari(truth, pred) == pytest.approx(1.0)

    def test_hand_contingency_nmi(self):
        assert nmi([0, 0, 1, 1], [0, 1, 1, 1]) == pytest.approx(
            0.3437110184854508
        )

    def test_pair_enumeration_ari(self):
        assert ari([0, 0, 1, 1], [0, 1, 0, 1]) == pytest.approx(-0.5)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_exhaustive_against_references(self, n):
        partitions = all_partitions(n)
        for truth, pred in itertools.product(partitions, partitions):
            assert nmi(truth, pred) == pytest.approx(
                nmi_reference(truth, pred), abs=1e-12
            )
            assert ari(truth, pred) == pytest.approx(
                ari_reference(truth, pred), abs=1e-12
            )

    def test_ari_never_exceeds_one(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            t = rng.integers(0, 4, size=12)
            p = rng.integers(0, 4, size=12)
            assert ari(t, p) <= 1.0 + 1e-12


@pytest.fixture(scope="module")
def protocol_setup():
    g = make_synthetic_graph(num_nodes=60, num_classes=3, num_features=25,
                             seed=9)
    params = init_params(EncoderShape(25, (10, 8), 6), seed=1)
    return g, params


class TestProtocol:

    def test_embed_clean_matches_zero_augmentation(self, protocol_setup):
        from muxgcl.augment import make_views

        g, params = protocol_setup
        emb = embed_clean(g, params)
        cfg = AugmentConfig(edge_drop=(0.0, 0.0), feature_mask=(0.0, 0.0))
        view, _ = make_views(g, cfg, np.random.default_rng(0))
        from muxgcl.encoder import forward

        assert np.array_equal(emb, forward(view, params).layers[-1])
        assert emb.shape == (60, 8)

    def test_classification_report_consistency(self, protocol_setup):
        g, params = protocol_setup
        emb = embed_clean(g, params)
        report = evaluate_classification(g, emb, seeds=(0, 1, 2), l2=0.01)
        values = report.per_seed["accuracy"]
        assert len(values) == 3
        assert report.mean["accuracy"] == pytest.approx(np.mean(values))
        assert report.std["accuracy"] == pytest.approx(np.std(values))
        parsed = json.loads(report.to_json())
        assert parsed["task"] == "classification"

    def test_clustering_report(self, protocol_setup):
        g, params = protocol_setup
        emb = embed_clean(g, params)
        report = evaluate_clustering(g, emb, seeds=(0, 1))
        assert set(report.per_seed) == {"nmi", "ari"}
        assert all(0.0 <= v <= 1.0 for v in report.per_seed["nmi"])
