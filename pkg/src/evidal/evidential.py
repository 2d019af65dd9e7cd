"""Dirichlet-opinion math: evidence to opinion, loss terms, gradients.

Class evidence e_k >= 0 maps to a Dirichlet opinion with parameters
α_k = e_k + 1, strength S = Σα_k, belief masses b_k = e_k / S and
uncertainty u = K / S, so that u + Σ b_k = 1.

The supervised loss per sample is the expected squared error of the
label one-hot under the opinion's Dirichlet (closed form: prediction
error plus variance), plus an annealed KL penalty to the uniform
Dirichlet applied after the true class's evidence is removed.

Everything here is a pure function of its arguments; gradients are taken
with respect to the evidence vector (the activation's own derivative is
the caller's business).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import digamma, log_gamma, trigamma


@dataclass(frozen=True)
class DirichletOpinion:
    """Opinion for one sample: Dirichlet parameters and derived masses."""

    alpha: np.ndarray
    strength: float
    belief: np.ndarray
    uncertainty: float
    expected_prob: np.ndarray

    @property
    def num_classes(self) -> int:
        return self.alpha.shape[0]


@dataclass(frozen=True)
class LossBreakdown:
    """Batch-summed loss terms; ``lam`` is the annealing coefficient λ_t."""

    mse_term: float
    kl_term: float
    lam: float
    total: float


def one_hot(labels, num_classes: int) -> np.ndarray:
    """Row-per-sample one-hot encoding of integer class labels."""
    labels = np.asarray(labels, dtype=np.int64)
    if labels.ndim != 1:
        raise ValueError("labels must be one-dimensional")
    if np.any(labels < 0) or np.any(labels >= num_classes):
        raise ValueError(f"labels must lie in [0, {num_classes})")
    out = np.zeros((labels.shape[0], num_classes), dtype=np.float64)
    out[np.arange(labels.shape[0]), labels] = 1.0
    return out


def _validate_evidence(e: np.ndarray) -> None:
    if e.ndim != 1 or e.shape[0] < 2:
        raise ValueError("evidence must be a vector with at least 2 classes")
    if not np.all(np.isfinite(e)) or np.any(e < 0.0):
        raise ValueError("evidence components must be finite and >= 0")


def opinion_from_evidence(e) -> DirichletOpinion:
    """Convert one evidence vector into a Dirichlet opinion.

    With zero evidence every belief mass is zero and uncertainty is one.
    """
    e = np.asarray(e, dtype=np.float64)
    _validate_evidence(e)
    alpha = e + 1.0
    strength = float(np.sum(alpha))
    return DirichletOpinion(
        alpha=alpha,
        strength=strength,
        belief=e / strength,
        uncertainty=e.shape[0] / strength,
        expected_prob=alpha / strength,
    )


def dirichlet_log_density(p, alpha) -> float:
    """ln D(p‖α) at an interior point of the probability simplex."""
    p = np.asarray(p, dtype=np.float64)
    alpha = np.asarray(alpha, dtype=np.float64)
    if p.shape != alpha.shape or p.ndim != 1:
        raise ValueError("p and alpha must be vectors of equal length")
    if np.any(p <= 0.0):
        raise ValueError("p must be strictly interior to the simplex")
    if abs(float(np.sum(p)) - 1.0) > 1e-9:
        raise ValueError("p must sum to 1")
    log_beta = float(np.sum(log_gamma(alpha)) - log_gamma(np.sum(alpha)))
    return float(np.sum((alpha - 1.0) * np.log(p))) - log_beta


def _mse_loss_rows(alpha: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Closed-form expected squared error per row: Σ_j (y−p)² + p(1−p)/(S+1)."""
    strength = np.sum(alpha, axis=1, keepdims=True)
    p = alpha / strength
    err = np.sum((y - p) ** 2, axis=1)
    var = np.sum(p * (1.0 - p) / (strength + 1.0), axis=1)
    return err + var


def evidential_mse_loss(alpha, y) -> float:
    """Expected squared label error under Dirichlet(α) for one sample."""
    alpha = np.atleast_2d(np.asarray(alpha, dtype=np.float64))
    y = np.atleast_2d(np.asarray(y, dtype=np.float64))
    return float(_mse_loss_rows(alpha, y)[0])


def remove_non_misleading(alpha, y) -> np.ndarray:
    """Reset the true class's parameter to 1: α̃ = y + (1 − y)·α."""
    alpha = np.asarray(alpha, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    return y + (1.0 - y) * alpha


def _kl_rows(alpha_tilde: np.ndarray) -> np.ndarray:
    """KL(Dirichlet(α̃) ‖ Dirichlet(1,…,1)) per row, clamped at 0."""
    k = alpha_tilde.shape[1]
    s = np.sum(alpha_tilde, axis=1)
    kl = (
        log_gamma(s)
        - log_gamma(float(k))
        - np.sum(log_gamma(alpha_tilde), axis=1)
        + np.sum((alpha_tilde - 1.0) * (digamma(alpha_tilde) - digamma(s)[:, None]), axis=1)
    )
    # exact minimum (α̃ = 1) can land a few ulp below zero
    return np.maximum(kl, 0.0)


def kl_to_uniform(alpha_tilde) -> float:
    """KL divergence of Dirichlet(α̃) from the uniform Dirichlet."""
    alpha_tilde = np.asarray(alpha_tilde, dtype=np.float64)
    if np.any(alpha_tilde < 1.0):
        raise ValueError("alpha_tilde components must be >= 1")
    return float(_kl_rows(np.atleast_2d(alpha_tilde))[0])


def annealing_coefficient(t: int) -> float:
    """KL ramp λ_t = min(1, t/10) for 1-based epoch index t."""
    if t < 1:
        raise ValueError("epoch index t is 1-based")
    return min(1.0, t / 10.0)


def _validate_batch(evidence: np.ndarray, y: np.ndarray) -> None:
    if evidence.ndim != 2 or evidence.shape[0] == 0:
        raise ValueError("batch must be a non-empty (B, K) array")
    if evidence.shape != y.shape:
        raise ValueError("evidence and labels must share shape (B, K)")
    if evidence.shape[1] < 2:
        raise ValueError("need at least 2 classes")
    if np.any(evidence < 0.0) or not np.all(np.isfinite(evidence)):
        raise ValueError("evidence must be finite and >= 0")


def total_loss(evidence, y, t: int) -> LossBreakdown:
    """Batch-summed loss: Σᵢ mse(αᵢ, yᵢ) + λ_t · Σᵢ KL(α̃ᵢ ‖ uniform)."""
    evidence = np.asarray(evidence, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    _validate_batch(evidence, y)
    lam = annealing_coefficient(t)
    alpha = evidence + 1.0
    mse = float(np.sum(_mse_loss_rows(alpha, y)))
    kl = float(np.sum(_kl_rows(remove_non_misleading(alpha, y))))
    return LossBreakdown(mse_term=mse, kl_term=kl, lam=lam, total=mse + lam * kl)


def total_loss_gradient(evidence, y, t: int) -> np.ndarray:
    """Analytic ∂(batch total loss)/∂evidence, shape (B, K).

    The squared-error term is differentiated through p = α/S; the KL term
    through ∂KL/∂α̃_k = (α̃_k − 1)ψ₁(α̃_k) − (S̃ − K)ψ₁(S̃) chained by
    ∂α̃_k/∂α_k = 1 − y_k and ∂α/∂e = 1.
    """
    evidence = np.asarray(evidence, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    _validate_batch(evidence, y)
    lam = annealing_coefficient(t)
    k = evidence.shape[1]

    alpha = evidence + 1.0
    strength = np.sum(alpha, axis=1, keepdims=True)
    p = alpha / strength

    g = -2.0 * (y - p) + (1.0 - 2.0 * p) / (strength + 1.0)
    var_shift = np.sum(p * (1.0 - p), axis=1, keepdims=True) / (strength + 1.0) ** 2
    mse_grad = (g - np.sum(g * p, axis=1, keepdims=True)) / strength - var_shift

    alpha_tilde = remove_non_misleading(alpha, y)
    s_tilde = np.sum(alpha_tilde, axis=1, keepdims=True)
    kl_grad_tilde = (alpha_tilde - 1.0) * trigamma(alpha_tilde) - (
        s_tilde - k
    ) * trigamma(s_tilde)
    kl_grad = (1.0 - y) * kl_grad_tilde

    return mse_grad + lam * kl_grad
