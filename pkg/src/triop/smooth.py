"""Smooth convex losses with certified Lipschitz constants."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ConfigurationError, SmoothOracle

POWER_ITER_TOL = 1e-9
POWER_ITER_MAX = 10_000
POWER_ITER_SEED = 0
# Overestimating L is safe for the step-size rule, underestimating is not.
LIPSCHITZ_INFLATION = 1.0 + 1e-6


@dataclass(frozen=True)
class LeastSquaresSpec:
    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.asarray(self.b, dtype=float).ravel()
        if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
            raise ConfigurationError(f"A must be a non-empty matrix, got shape {A.shape}")
        if b.shape[0] != A.shape[0]:
            raise ConfigurationError(f"dimension mismatch: A is {A.shape}, b has length {b.shape[0]}")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise ConfigurationError("A and b must have finite entries")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)


@dataclass(frozen=True)
class LogisticSpec:
    A: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        y = np.asarray(self.labels, dtype=float).ravel()
        if y.shape[0] != A.shape[0]:
            raise ConfigurationError(f"dimension mismatch: A is {A.shape}, labels has length {y.shape[0]}")
        if not np.all((y == 1.0) | (y == -1.0)):
            raise ConfigurationError("labels must be in {-1, +1}")
        if not np.all(np.isfinite(A)):
            raise ConfigurationError("A must have finite entries")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "labels", y)


def spectral_norm_sq(A, tol=POWER_ITER_TOL, max_iter=POWER_ITER_MAX, seed=POWER_ITER_SEED) -> float:
    """Largest eigenvalue of A^T A by power iteration (deterministic start)."""
    A = np.asarray(A, dtype=float)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(A.shape[1])
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(max_iter):
        w = A.T @ (A @ v)
        new = float(v @ w)
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        v = w / norm
        if abs(new - est) <= tol * abs(new):
            return new
        est = new
    return est


def least_squares(spec: LeastSquaresSpec) -> SmoothOracle:
    """f(x) = 0.5 ||Ax - b||^2."""
    A, b = spec.A, spec.b
    L = spectral_norm_sq(A) * LIPSCHITZ_INFLATION

    def value(x):
        r = A @ x - b
        return 0.5 * float(r @ r)

    def grad(x):
        return A.T @ (A @ x - b)

    return SmoothOracle(eval=value, grad=grad, lipschitz=L, name="least_squares")


def _log1pexp(t):
    # log(1 + exp(t)) without overflow
    return np.maximum(t, 0.0) + np.log1p(np.exp(-np.abs(t)))


def _sigmoid(t):
    e = np.exp(-np.abs(t))
    return np.where(t >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


def logistic(spec: LogisticSpec) -> SmoothOracle:
    """f(x) = sum_i log(1 + exp(-y_i a_i^T x))."""
    A, y = spec.A, spec.labels
    L = 0.25 * spectral_norm_sq(A) * LIPSCHITZ_INFLATION

    def value(x):
        return float(np.sum(_log1pexp(-y * (A @ x))))

    def grad(x):
        return A.T @ (-y * _sigmoid(-y * (A @ x)))

    return SmoothOracle(eval=value, grad=grad, lipschitz=L, name="logistic")


def zero_smooth(p: int) -> SmoothOracle:
    def value(x):
        return 0.0

    def grad(x):
        return np.zeros(p)

    return SmoothOracle(eval=value, grad=grad, lipschitz=0.0, name="zero")
