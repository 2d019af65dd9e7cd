"""Three training stages: contrastive pre-training on unlabeled vectors,
evidential fine-tuning on labels, and optional teacher→student
distillation on soft expected probabilities.

Pre-training sees two augmented views per sample and pulls sibling views
together on the projection head (temperature-scaled cosine similarity,
denominator over the other samples' views).  The evidence head is never
touched by pre-training; distillation and fine-tuning never touch the
projection head.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .evidential import LossBreakdown
from .network import (
    ModelState,
    NonFiniteLossError,
    TrainHyper,
    _encoder_backward,
    _evidence_activation_grad,
    _forward_trace,
    adam_step,
    train_epoch,
)

DOMAIN_INDOMAIN = "indomain"
DOMAIN_OUTDOMAIN = "outdomain"

STAGE_PRETRAINED = "pretrained"
STAGE_FINETUNED = "finetuned"
STAGE_DISTILLED = "distilled"


@dataclass(frozen=True)
class AugmentationConfig:
    """Vector-data augmentation: additive Gaussian noise scaled by the
    per-feature standard deviation, plus random feature dropout."""

    noise_sigma: float = 0.1
    feature_dropout_prob: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")
        if not 0.0 <= self.feature_dropout_prob <= 1.0:
            raise ValueError("feature_dropout_prob must be in [0, 1]")


@dataclass(frozen=True)
class PretrainConfig:
    temperature: float = 0.5
    epochs: int = 20
    batch_size: int = 64
    domain: str = DOMAIN_INDOMAIN

    def __post_init__(self):
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")
        if self.batch_size < 2:
            raise ValueError("contrastive batches need at least 2 samples")


def augment_views(
    x: np.ndarray, feature_std: np.ndarray, aug: AugmentationConfig, rng: np.random.Generator
) -> np.ndarray:
    """Two augmented views per row, siblings adjacent: rows 2i and 2i+1."""
    b, d = x.shape
    views = np.repeat(x, 2, axis=0)
    views += aug.noise_sigma * feature_std * rng.normal(size=(2 * b, d))
    if aug.feature_dropout_prob > 0.0:
        keep = rng.random(size=(2 * b, d)) >= aug.feature_dropout_prob
        views *= keep
    return views


def contrastive_loss_and_grads(
    model: ModelState, views: np.ndarray, temperature: float
) -> tuple[float, np.ndarray, dict[str, np.ndarray]]:
    """Mean per-anchor loss over 2B views (siblings adjacent) and its
    parameter gradients through the projection head and encoder.

    Per anchor: −ln[ exp(s_pos/τ) / Σ_neg exp(s_neg/τ) ] where the
    negatives are the 2B−2 views of the *other* samples.
    """
    n_views = views.shape[0]
    if n_views < 4 or n_views % 2 != 0:
        raise ValueError("need two views each of at least 2 samples")
    trace = _forward_trace(model, views)
    z = trace["embedding"] @ model.params["proj_w"] + model.params["proj_b"]
    norms = np.linalg.norm(z, axis=1, keepdims=True)
    norms = np.maximum(norms, 1e-12)
    u = z / norms
    sims = u @ u.T

    sibling = np.arange(n_views) ^ 1
    own = np.zeros((n_views, n_views), dtype=bool)
    idx = np.arange(n_views)
    own[idx, idx] = True
    own[idx, sibling] = True  # anchor's own sample: excluded from negatives

    scaled = sims / temperature
    neg_scaled = np.where(own, -np.inf, scaled)
    m = neg_scaled.max(axis=1, keepdims=True)
    exp_neg = np.exp(neg_scaled - m)
    denom = exp_neg.sum(axis=1, keepdims=True)
    log_denom = (m + np.log(denom)).ravel()
    pos = scaled[idx, sibling]
    per_anchor = -pos + log_denom
    loss = float(per_anchor.mean())
    if not np.isfinite(loss):
        raise NonFiniteLossError("non-finite contrastive loss")

    # d loss / d sims
    g = exp_neg / denom / (temperature * n_views)  # softmax over negatives
    g[idx, sibling] -= 1.0 / (temperature * n_views)
    d_u = (g + g.T) @ u
    # back through the row normalization
    d_z = (d_u - np.sum(d_u * u, axis=1, keepdims=True) * u) / norms
    grads: dict[str, np.ndarray] = {
        "proj_w": trace["embedding"].T @ d_z,
        "proj_b": d_z.sum(axis=0),
    }
    _encoder_backward(model, trace, d_z @ model.params["proj_w"].T, grads)
    return loss, per_anchor, grads


def pretrain_contrastive(
    model: ModelState,
    xs: np.ndarray,
    pretrain: PretrainConfig,
    aug: AugmentationConfig,
    hyper: TrainHyper | None = None,
) -> tuple[ModelState, list[float]]:
    """Contrastive pre-training pass; returns per-epoch mean losses."""
    xs = np.asarray(xs, dtype=np.float64)
    if xs.shape[0] < 2:
        raise ValueError("pre-training needs at least 2 samples")
    hyper = hyper or TrainHyper()
    feature_std = xs.std(axis=0)
    model.reset_optimizer()
    head_before = model.params["head_w"].copy()
    epoch_losses: list[float] = []
    for epoch in range(pretrain.epochs):
        rng = np.random.default_rng([aug.seed, epoch])
        order = rng.permutation(xs.shape[0])
        losses = []
        for start in range(0, xs.shape[0], pretrain.batch_size):
            idx = order[start : start + pretrain.batch_size]
            if idx.shape[0] < 2:
                continue  # a single leftover sample has no negatives
            views = augment_views(xs[idx], feature_std, aug, rng)
            loss, _, grads = contrastive_loss_and_grads(model, views, pretrain.temperature)
            adam_step(model, grads, hyper)
            losses.append(loss)
        epoch_losses.append(float(np.mean(losses)))
    assert np.array_equal(model.params["head_w"], head_before)
    return model, epoch_losses


def finetune_evidential(
    model: ModelState,
    x: np.ndarray,
    y_onehot: np.ndarray,
    epochs: int,
    rng: np.random.Generator,
    anneal_start_t: int = 1,
    hyper: TrainHyper | None = None,
) -> tuple[ModelState, list[LossBreakdown]]:
    """Evidential fine-tuning for ``epochs`` passes, KL ramp starting at
    ``anneal_start_t``.  ``epochs = 0`` leaves the model untouched."""
    if epochs < 0:
        raise ValueError("epochs must be >= 0")
    if epochs == 0:
        return model, []
    hyper = hyper or TrainHyper()
    model.reset_optimizer()
    history: list[LossBreakdown] = []
    for t in range(anneal_start_t, anneal_start_t + epochs):
        _, breakdown = train_epoch(model, x, y_onehot, t, hyper, rng)
        history.append(breakdown)
    return model, history


def soft_targets(teacher: ModelState, xs: np.ndarray) -> np.ndarray:
    """Teacher pseudo-labels: expected class probabilities α/S."""
    trace = _forward_trace(teacher, np.asarray(xs, dtype=np.float64))
    alpha = trace["evidence"] + 1.0
    return alpha / alpha.sum(axis=1, keepdims=True)


def distill(
    teacher: ModelState,
    student: ModelState,
    xs: np.ndarray,
    epochs: int,
    rng: np.random.Generator,
    hyper: TrainHyper | None = None,
) -> tuple[ModelState, list[float]]:
    """Train the student to match the teacher's expected probabilities.

    Minimizes the mean cross-entropy −Σ_k q_k ln p̂_k between teacher
    targets q and the student's own expected probabilities p̂.
    """
    if teacher.config.num_classes != student.config.num_classes:
        raise ValueError("teacher and student must share the class count")
    xs = np.asarray(xs, dtype=np.float64)
    if epochs == 0:
        return student, []
    hyper = hyper or TrainHyper()
    targets = soft_targets(teacher, xs)
    student.reset_optimizer()
    epoch_losses: list[float] = []
    for _ in range(epochs):
        order = rng.permutation(xs.shape[0])
        losses = []
        for start in range(0, xs.shape[0], hyper.batch_size):
            idx = order[start : start + hyper.batch_size]
            q = targets[idx]
            trace = _forward_trace(student, xs[idx])
            alpha = trace["evidence"] + 1.0
            strength = alpha.sum(axis=1, keepdims=True)
            p_hat = alpha / strength
            loss = float(np.mean(-np.sum(q * np.log(p_hat), axis=1)))
            if not np.isfinite(loss):
                raise NonFiniteLossError("non-finite distillation loss")
            # d/dα of −Σ q ln(α/S) = 1/S − q/α, averaged over the batch
            d_alpha = (1.0 / strength - q / alpha) / idx.shape[0]
            d_z_head = d_alpha * _evidence_activation_grad(
                trace["z_head"], student.config.evidence_activation
            )
            grads: dict[str, np.ndarray] = {
                "head_w": trace["embedding"].T @ d_z_head,
                "head_b": d_z_head.sum(axis=0),
            }
            _encoder_backward(student, trace, d_z_head @ student.params["head_w"].T, grads)
            adam_step(student, grads, hyper)
            losses.append(loss)
        epoch_losses.append(float(np.mean(losses)))
    return student, epoch_losses
