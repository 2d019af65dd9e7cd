"""Metric implementations vs brute-force oracles: a full confusion-matrix
computation for weighted F1, and both trapezoidal ROC integration and
O(n²) pair counting for AUC.
"""

import math

import numpy as np
import pytest

from evidal.evidential import opinion_from_evidence
from evidal.metrics import (
    HistogramPair,
    accuracy,
    binary_auc,
    load_histograms,
    save_histograms,
    uncertainty_histograms,
    uncertainty_separation,
    weighted_f1,
)
from evidal.network import Prediction


def mk_pred(true, pred, u=0.5, k=3, sid=0):
    strength = k / u
    e = np.zeros(k)
    e[pred] = strength - k
    return Prediction(sample_id=sid, opinion=opinion_from_evidence(e),
                      predicted_class=pred, true_label=true)


def mk_preds(y_true, y_pred, us=None, k=None):
    k = k or int(max(max(y_true), max(y_pred)) + 1)
    if k < 2:
        k = 2
    us = us or [0.5] * len(y_true)
    return [mk_pred(t, p, u, k, i) for i, (t, p, u) in enumerate(zip(y_true, y_pred, us))]


def f1_from_confusion_matrix(y_true, y_pred, k):
    """Oracle: build the full K×K confusion matrix, derive weighted F1."""
    cm = np.zeros((k, k), dtype=np.int64)
    for t, p in zip(y_true, y_pred):
        cm[t, p] += 1
    total = cm.sum()
    out = 0.0
    for c in range(k):
        support = cm[c, :].sum()
        if support == 0:
            continue
        tp = cm[c, c]
        predicted = cm[:, c].sum()
        precision = tp / predicted if predicted else 0.0
        recall = tp / support
        f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
        out += support / total * f1
    return out


def auc_trapezoidal(scores, labels):
    """Oracle: explicit ROC curve with tie-grouped thresholds, trapezoid rule."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels)
    thresholds = np.unique(scores)[::-1]
    n_pos = np.sum(labels == 1)
    n_neg = np.sum(labels == 0)
    tpr = [0.0]
    fpr = [0.0]
    for th in thresholds:
        tpr.append(np.sum((scores >= th) & (labels == 1)) / n_pos)
        fpr.append(np.sum((scores >= th) & (labels == 0)) / n_neg)
    return float(np.trapezoid(tpr, fpr))


def auc_pair_counting(scores, labels):
    """Oracle: literal Mann–Whitney double loop with half-credit ties."""
    pos = [s for s, l in zip(scores, labels) if l == 1]
    neg = [s for s, l in zip(scores, labels) if l == 0]
    wins = sum(1.0 if p > n else 0.5 if p == n else 0.0 for p in pos for n in neg)
    return wins / (len(pos) * len(neg))


class TestAccuracy:
    def test_extremes_and_fraction(self):
        assert accuracy(mk_preds([0, 1], [0, 1])) == 1.0
        assert accuracy(mk_preds([0, 1], [1, 0])) == 0.0
        assert accuracy(mk_preds([0, 0, 1, 1], [0, 0, 1, 0])) == 0.75

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            accuracy([])

    def test_missing_truth_rejected(self):
        bad = [Prediction(0, opinion_from_evidence([1.0, 0.0]), 0, None)]
        with pytest.raises(ValueError):
            accuracy(bad)


class TestWeightedF1:
    def test_perfect(self):
        assert weighted_f1(mk_preds([0, 1, 2], [0, 1, 2])) == 1.0

    def test_hand_example(self):
        """class-0 F1 = 0.8, class-1 F1 = 6/7, equal supports."""
        got = weighted_f1(mk_preds([0, 0, 0, 1, 1, 1], [0, 0, 1, 1, 1, 1]))
        assert got == pytest.approx(0.5 * 0.8 + 0.5 * (6.0 / 7.0), rel=1e-12)

    def test_absent_class_carries_no_weight(self):
        """Class 2 exists in the label space but never occurs."""
        a = weighted_f1(mk_preds([0, 1], [0, 1], k=3))
        assert a == 1.0

    def test_confusion_matrix_oracle(self):
        rng = np.random.default_rng(42)
        for _ in range(1000):
            k = int(rng.integers(2, 10))
            n = int(rng.integers(1, 40))
            y_true = rng.integers(0, k, size=n).tolist()
            y_pred = rng.integers(0, k, size=n).tolist()
            got = weighted_f1(mk_preds(y_true, y_pred, k=k))
            ref = f1_from_confusion_matrix(y_true, y_pred, k)
            assert abs(got - ref) <= 1e-12

    def test_label_permutation_invariance(self):
        rng = np.random.default_rng(9)
        y_true = rng.integers(0, 4, size=50).tolist()
        y_pred = rng.integers(0, 4, size=50).tolist()
        perm = [2, 3, 1, 0]
        base_f1 = weighted_f1(mk_preds(y_true, y_pred, k=4))
        base_acc = accuracy(mk_preds(y_true, y_pred, k=4))
        pt = [perm[t] for t in y_true]
        pp = [perm[p] for p in y_pred]
        assert weighted_f1(mk_preds(pt, pp, k=4)) == pytest.approx(base_f1, rel=1e-12)
        assert accuracy(mk_preds(pt, pp, k=4)) == pytest.approx(base_acc, rel=1e-12)


class TestBinaryAuc:
    def test_perfectly_separated(self):
        assert binary_auc([0.9, 0.8, 0.7, 0.1], [1, 1, 0, 0]) == 1.0

    def test_hand_pair_count(self):
        """3 of 4 (pos, neg) pairs ordered correctly."""
        assert binary_auc([0.9, 0.4, 0.6, 0.2], [1, 1, 0, 0]) == pytest.approx(0.75)

    def test_all_ties(self):
        assert binary_auc([0.5] * 6, [1, 0, 1, 0, 1, 0]) == pytest.approx(0.5)

    def test_oracles_agree(self):
        """Rank implementation == trapezoidal ROC == literal pair counting,
        on score sets with deliberate ties."""
        rng = np.random.default_rng(7)
        for _ in range(200):
            n = int(rng.integers(4, 40))
            scores = np.round(rng.uniform(0, 1, size=n), 1)  # force ties
            labels = rng.integers(0, 2, size=n)
            if labels.min() == labels.max():
                labels[0] = 1 - labels[0]
            got = binary_auc(scores, labels)
            assert abs(got - auc_trapezoidal(scores, labels)) <= 1e-10
            assert abs(got - auc_pair_counting(scores, labels)) <= 1e-10

    def test_single_class_rejected(self):
        with pytest.raises(ValueError):
            binary_auc([0.2, 0.4], [1, 1])

    def test_nonbinary_labels_rejected(self):
        with pytest.raises(ValueError):
            binary_auc([0.2, 0.4], [0, 2])

    def test_binary_benchmark_end_to_end(self):
        """A briefly fine-tuned model on the binary preset separates the
        classes: AUC of the positive-class expected probability >= 0.9."""
        from evidal.datagen import generate_gaussian_mixture, preset_spec
        from evidal.evidential import one_hot
        from evidal.network import NetworkConfig, init_model, predict_batch
        from evidal.pipeline import finetune_evidential

        pool = generate_gaussian_mixture(preset_spec("pcam-toy", seed=0))
        net = NetworkConfig(input_dim=pool.dim, hidden_dims=(16,), embedding_dim=8,
                            num_classes=2, evidence_activation="relu", seed=0)
        model = init_model(net)
        train = pool.train_pool_ids[:1500]
        finetune_evidential(model, pool.features[train],
                            one_hot(pool.labels[train], 2), epochs=5,
                            rng=np.random.default_rng(0))
        ev = pool.eval_ids
        preds = predict_batch(model, pool.features[ev], sample_ids=ev,
                              true_labels=pool.labels[ev])
        scores = [p.opinion.expected_prob[1] for p in preds]
        labels = [p.true_label for p in preds]
        assert binary_auc(scores, labels) >= 0.9


class TestUncertaintyHistograms:
    def test_all_confident_correct(self):
        preds = mk_preds([0, 1], [0, 1], us=[1e-9, 1e-9])
        pair = uncertainty_histograms(preds, num_bins=10)
        assert pair.counts_correct[0] == 2
        assert pair.counts_correct.sum() == 2 and pair.counts_incorrect.sum() == 0

    def test_u_of_one_lands_in_last_bin(self):
        preds = mk_preds([1, 0], [0, 0], us=[1.0, 1.0])
        pair = uncertainty_histograms(preds, num_bins=5)
        assert pair.counts_incorrect[-1] == 1
        assert pair.counts_correct[-1] == 1

    def test_partition_of_total(self):
        rng = np.random.default_rng(3)
        n = 200
        preds = mk_preds(rng.integers(0, 3, n).tolist(), rng.integers(0, 3, n).tolist(),
                         us=rng.uniform(0.01, 1.0, n).tolist(), k=3)
        pair = uncertainty_histograms(preds)
        assert pair.counts_correct.sum() + pair.counts_incorrect.sum() == n
        assert pair.bin_edges.shape == (21,)

    def test_round_trip_file(self, tmp_path):
        preds = mk_preds([0, 1, 1], [0, 1, 0], us=[0.2, 0.4, 0.9])
        pair = uncertainty_histograms(preds, num_bins=4)
        path = tmp_path / "hist.json"
        save_histograms(pair, path)
        loaded = load_histograms(path)
        assert isinstance(loaded, HistogramPair)
        np.testing.assert_array_equal(loaded.bin_edges, pair.bin_edges)
        np.testing.assert_array_equal(loaded.counts_correct, pair.counts_correct)
        np.testing.assert_array_equal(loaded.counts_incorrect, pair.counts_incorrect)


class TestUncertaintySeparation:
    def test_two_sided(self):
        preds = mk_preds([0, 1], [0, 0], us=[0.1, 0.9])
        assert uncertainty_separation(preds) == (pytest.approx(0.1), pytest.approx(0.9))

    def test_identical_uncertainty(self):
        preds = mk_preds([0, 1], [0, 0], us=[0.4, 0.4])
        mc, mi = uncertainty_separation(preds)
        assert mc == pytest.approx(mi)

    def test_degenerate_sides_flagged_nan(self):
        all_correct = mk_preds([0, 1], [0, 1], us=[0.3, 0.5])
        mc, mi = uncertainty_separation(all_correct)
        assert mc == pytest.approx(0.4) and math.isnan(mi)
        all_wrong = mk_preds([0, 1], [1, 0], us=[0.3, 0.5])
        mc, mi = uncertainty_separation(all_wrong)
        assert math.isnan(mc) and mi == pytest.approx(0.4)
