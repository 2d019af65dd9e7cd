"""Scalar special functions and a finite-difference gradient helper.

All functions work in float64, accept scalars or numpy arrays, and raise
``ValueError`` outside their domain (arguments must be strictly positive).
They are pure and safe to call concurrently.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

# Lanczos approximation, g = 7, 9 coefficients.  Accurate to ~15
# significant digits for real arguments >= 0.5.
_LANCZOS_G = 7.0
_LANCZOS_COEF = np.array(
    [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ]
)

_HALF_LOG_TWO_PI = 0.5 * np.log(2.0 * np.pi)

# Upward recurrence pushes arguments past this point before the
# asymptotic (Bernoulli-number) series is applied.
_ASYMPTOTIC_CUTOFF = 10.0


def _validate_positive(x: np.ndarray, name: str) -> None:
    if not np.all(x > 0.0):  # also rejects NaN
        raise ValueError(f"{name} requires strictly positive arguments")


def _as_float_array(x) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=np.float64)
    return np.atleast_1d(arr).copy(), arr.ndim == 0


def log_gamma(x):
    """Natural log of the gamma function, ln Γ(x), for x > 0.

    Lanczos approximation for x >= 0.5; one step of the recurrence
    ln Γ(x) = ln Γ(x + 1) − ln x below that.
    """
    arr, scalar = _as_float_array(x)
    _validate_positive(arr, "log_gamma")

    small = arr < 0.5
    z = np.where(small, arr + 1.0, arr)

    series = np.full_like(z, _LANCZOS_COEF[0])
    for k in range(1, len(_LANCZOS_COEF)):
        series += _LANCZOS_COEF[k] / (z - 1.0 + k)
    t = z + _LANCZOS_G - 0.5
    out = _HALF_LOG_TWO_PI + (z - 0.5) * np.log(t) - t + np.log(series)

    out = np.where(small, out - np.log(arr), out)
    return float(out[0]) if scalar else out


def digamma(x):
    """Digamma ψ(x) = d/dx ln Γ(x) for x > 0.

    Upward recurrence ψ(x) = ψ(x+1) − 1/x until x >= 10, then the
    asymptotic series through the 1/x^14 term.
    """
    arr, scalar = _as_float_array(x)
    _validate_positive(arr, "digamma")

    acc = np.zeros_like(arr)
    mask = arr < _ASYMPTOTIC_CUTOFF
    while mask.any():
        acc[mask] -= 1.0 / arr[mask]
        arr[mask] += 1.0
        mask = arr < _ASYMPTOTIC_CUTOFF

    inv = 1.0 / arr
    u = inv * inv
    tail = u * (
        1.0 / 12.0
        - u * (1.0 / 120.0 - u * (1.0 / 252.0 - u * (1.0 / 240.0
            - u * (1.0 / 132.0 - u * (691.0 / 32760.0 - u / 12.0)))))
    )
    out = acc + np.log(arr) - 0.5 * inv - tail
    return float(out[0]) if scalar else out


def trigamma(x):
    """Trigamma ψ₁(x) = d²/dx² ln Γ(x) for x > 0.

    Upward recurrence ψ₁(x) = ψ₁(x+1) + 1/x² until x >= 10, then the
    asymptotic series through the 1/x^13 term.
    """
    arr, scalar = _as_float_array(x)
    _validate_positive(arr, "trigamma")

    acc = np.zeros_like(arr)
    mask = arr < _ASYMPTOTIC_CUTOFF
    while mask.any():
        acc[mask] += 1.0 / (arr[mask] * arr[mask])
        arr[mask] += 1.0
        mask = arr < _ASYMPTOTIC_CUTOFF

    inv = 1.0 / arr
    u = inv * inv
    tail = u * (
        1.0 / 6.0
        - u * (1.0 / 30.0 - u * (1.0 / 42.0 - u * (1.0 / 30.0
            - u * (5.0 / 66.0 - u * 691.0 / 2730.0))))
    )
    out = acc + inv + 0.5 * u + inv * tail
    return float(out[0]) if scalar else out


def finite_difference_gradient(
    f: Callable[[np.ndarray], float], x: np.ndarray, h: float = 1e-5
) -> np.ndarray:
    """Central-difference gradient of a scalar function of a vector.

    Returns (f(x + h·eᵢ) − f(x − h·eᵢ)) / (2h) for every coordinate i.
    Evaluation failures in ``f`` propagate unchanged.
    """
    if h <= 0.0:
        raise ValueError("step size h must be positive")
    x = np.array(x, dtype=np.float64)  # private copy; f sees the perturbed copy
    grad = np.zeros_like(x)
    flat = x.reshape(-1)
    out = grad.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + h
        f_plus = f(x)
        flat[i] = orig - h
        f_minus = f(x)
        flat[i] = orig
        out[i] = (f_plus - f_minus) / (2.0 * h)
    return grad
