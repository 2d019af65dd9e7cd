"""Evaluation metrics over prediction sequences.

All functions are pure; predictions must carry ground truth (``true_label``)
except for ``binary_auc`` which works on raw scores.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .network import Prediction


@dataclass(frozen=True)
class HistogramPair:
    """Uncertainty histograms of correct vs incorrect predictions."""

    bin_edges: np.ndarray
    counts_correct: np.ndarray
    counts_incorrect: np.ndarray


def _require_truth(preds: Sequence[Prediction]) -> None:
    if len(preds) == 0:
        raise ValueError("need at least one prediction")
    if any(p.true_label is None for p in preds):
        raise ValueError("predictions must carry ground-truth labels")


def accuracy(preds: Sequence[Prediction]) -> float:
    """Fraction of predictions matching ground truth."""
    _require_truth(preds)
    return sum(1 for p in preds if p.correct) / len(preds)


def weighted_f1(preds: Sequence[Prediction]) -> float:
    """Per-class F1 averaged with weights proportional to true-class support.

    Zero-division conventions: a class never predicted has precision 0; a
    class with precision + recall = 0 has F1 = 0; a class absent from the
    ground truth carries weight 0.
    """
    _require_truth(preds)
    y_true = np.array([p.true_label for p in preds])
    y_pred = np.array([p.predicted_class for p in preds])
    total = y_true.shape[0]
    score = 0.0
    for cls in np.unique(y_true):
        support = int(np.sum(y_true == cls))
        tp = int(np.sum((y_true == cls) & (y_pred == cls)))
        fp = int(np.sum((y_true != cls) & (y_pred == cls)))
        fn = support - tp
        precision = tp / (tp + fp) if tp + fp > 0 else 0.0
        recall = tp / support
        f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
        score += (support / total) * f1
    return score


def binary_auc(scores, labels) -> float:
    """Area under the ROC curve for binary labels.

    Computed as the Mann–Whitney statistic via average ranks: the
    fraction of (positive, negative) pairs ranked correctly, ties
    counting one half.  Equals trapezoidal ROC integration.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise ValueError("scores and labels must be equal-length vectors")
    n_pos = int(np.sum(labels == 1))
    n_neg = int(np.sum(labels == 0))
    if n_pos + n_neg != labels.shape[0]:
        raise ValueError("labels must be 0 or 1")
    if n_pos == 0 or n_neg == 0:
        raise ValueError("need at least one positive and one negative")
    order = np.argsort(scores, kind="stable")
    ranks = np.empty(scores.shape[0], dtype=np.float64)
    sorted_scores = scores[order]
    i = 0
    while i < sorted_scores.shape[0]:
        j = i
        while j + 1 < sorted_scores.shape[0] and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0  # average 1-based rank
        i = j + 1
    rank_sum_pos = float(np.sum(ranks[labels == 1]))
    return (rank_sum_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def uncertainty_histograms(preds: Sequence[Prediction], num_bins: int = 20) -> HistogramPair:
    """Bin uncertainty values of correct and incorrect predictions.

    Uniform edges over [0, 1]; the final bin includes its right edge, so
    u = 1 lands in the last bin.
    """
    _require_truth(preds)
    if num_bins < 2:
        raise ValueError("need at least 2 bins")
    edges = np.linspace(0.0, 1.0, num_bins + 1)
    u_correct = np.array([p.opinion.uncertainty for p in preds if p.correct])
    u_incorrect = np.array([p.opinion.uncertainty for p in preds if not p.correct])
    counts_c, _ = np.histogram(u_correct, bins=edges)
    counts_i, _ = np.histogram(u_incorrect, bins=edges)
    return HistogramPair(bin_edges=edges, counts_correct=counts_c, counts_incorrect=counts_i)


def uncertainty_separation(preds: Sequence[Prediction]) -> tuple[float, float]:
    """Mean uncertainty of correct and of incorrect predictions.

    A side with no members is reported as NaN rather than raising, so
    degenerate rounds (all correct / all incorrect) stay recordable.
    """
    _require_truth(preds)
    u_correct = [p.opinion.uncertainty for p in preds if p.correct]
    u_incorrect = [p.opinion.uncertainty for p in preds if not p.correct]
    mean_c = float(np.mean(u_correct)) if u_correct else math.nan
    mean_i = float(np.mean(u_incorrect)) if u_incorrect else math.nan
    return mean_c, mean_i


def save_histograms(pair: HistogramPair, path) -> None:
    payload = {
        "bin_edges": [float(v) for v in pair.bin_edges],
        "counts_correct": [int(v) for v in pair.counts_correct],
        "counts_incorrect": [int(v) for v in pair.counts_incorrect],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def load_histograms(path) -> HistogramPair:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    return HistogramPair(
        bin_edges=np.asarray(payload["bin_edges"], dtype=np.float64),
        counts_correct=np.asarray(payload["counts_correct"], dtype=np.int64),
        counts_incorrect=np.asarray(payload["counts_incorrect"], dtype=np.int64),
    )
