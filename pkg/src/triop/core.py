"""Domain types shared by the solver, the operator catalogs and the diagnostics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np


class ConfigurationError(ValueError):
    """Invalid solver or experiment configuration."""


class NumericalError(ArithmeticError):
    """An oracle returned non-finite values."""

    def __init__(self, oracle: str, message: str = ""):
        self.oracle = oracle
        super().__init__(message or f"non-finite output from oracle '{oracle}'")


class InvalidReferenceError(ValueError):
    """A supplied reference point is not a fixed point of the iteration."""


class InequalityViolation(RuntimeError):
    """A certified inequality failed on a trajectory.

    Carries the offending report and, when raised from ``solve``, the
    partial result collected up to the violation.
    """

    def __init__(self, report, partial=None):
        self.report = report
        self.partial = partial
        super().__init__(
            f"{report.name} inequality violated at {report.location}: "
            f"residual={report.residual:.6g}"
        )


@dataclass(frozen=True)
class SmoothOracle:
    """Differentiable convex term: value, gradient and a Lipschitz constant
    of the gradient."""

    eval: Callable[[np.ndarray], float]
    grad: Callable[[np.ndarray], np.ndarray]
    lipschitz: float
    name: str = "f"

    def __post_init__(self):
        if not self.lipschitz >= 0 or not np.isfinite(self.lipschitz):
            raise ConfigurationError(f"lipschitz must be finite and >= 0, got {self.lipschitz}")


@dataclass(frozen=True)
class ProxOracle:
    """Proximable convex term.

    ``prox(gamma, v)`` returns argmin_u phi(u) + ||u - v||^2 / (2 gamma);
    ``eval(v)`` returns phi(v), possibly ``inf`` for indicators. ``eval``
    reduces over the last axis so it also accepts a stack of points.
    """

    prox: Callable[[float, np.ndarray], np.ndarray]
    eval: Callable[[np.ndarray], Union[float, np.ndarray]]
    name: str = "prox"
    is_projection: bool = False


@dataclass(frozen=True)
class SplitProblem:
    """Minimize f(x) + g(x) + h(x) over R^dim."""

    f: SmoothOracle
    g: ProxOracle
    h: ProxOracle
    dim: int

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise ConfigurationError(f"dim must be a positive integer, got {self.dim}")

    def objective(self, x: np.ndarray) -> float:
        return float(self.f.eval(x)) + float(self.g.eval(x)) + float(self.h.eval(x))


@dataclass
class SolverConfig:
    gamma: Union[float, str] = "auto"
    max_iter: int = 1000
    tol: float = 1e-8
    trace_every: int = 1
    check_inequalities: bool = False

    def __post_init__(self):
        if isinstance(self.gamma, str):
            if self.gamma != "auto":
                raise ConfigurationError(f"gamma must be a positive number or 'auto', got {self.gamma!r}")
        elif not (self.gamma > 0 and np.isfinite(self.gamma)):
            raise ConfigurationError(f"gamma must be positive, got {self.gamma}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ConfigurationError("max_iter must be a positive integer")
        if not self.tol >= 0:
            raise ConfigurationError("tol must be nonnegative")
        if int(self.trace_every) != self.trace_every or self.trace_every < 1:
            raise ConfigurationError("trace_every must be a positive integer")


@dataclass(frozen=True)
class IterateState:
    """One pass of the recurrence started at ``y``.

    ``grad_fx`` is the gradient of f evaluated at ``x``; it is kept so the
    diagnostics do not need to re-evaluate the oracle.
    """

    y: np.ndarray
    x: np.ndarray
    z: np.ndarray
    y_next: np.ndarray
    gmap: np.ndarray
    gamma: float
    grad_fx: np.ndarray


@dataclass(frozen=True)
class TraceRecord:
    iter: int
    gmap_norm: float
    objective: float
    infeas: float
    dist_to_ref: Optional[float] = None


def default_step_size(L: float) -> float:
    """Step size maximizing gamma^2 (2 - gamma L), i.e. 4 / (3 L)."""
    if not L > 0:
        raise ConfigurationError("automatic step size requires a Lipschitz constant L > 0")
    return 4.0 / (3.0 * L)


def step_size_quality(gamma, L: float):
    """gamma^2 (2 - gamma L), the constant in the denominator of the rate bound."""
    gamma = np.asarray(gamma, dtype=float)
    return gamma**2 * (2.0 - gamma * L)


def resolve_step_size(config: SolverConfig, L: float) -> float:
    """Return the step size used for a solve and validate gamma < 2/L."""
    if config.gamma == "auto":
        gamma = default_step_size(L)
    else:
        gamma = float(config.gamma)
    if L > 0 and not gamma * L < 2.0:
        raise ConfigurationError(
            f"gamma must satisfy gamma < 2/L (got gamma={gamma:.6g}, 2/L={2.0 / L:.6g})"
        )
    return gamma
