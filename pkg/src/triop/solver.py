"""Three-operator splitting iteration.

Each step maps y to

    x  = prox_{gamma g}(y)
    z  = prox_{gamma h}(2x - y - gamma grad f(x))
    y+ = y - x + z

and the gradient mapping is G(y) = (x - z) / gamma = (y - y+) / gamma, so
the update reads y+ = y - gamma G(y). Iteration stops when ||G(y)|| <= tol.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .core import (
    InequalityViolation,
    IterateState,
    NumericalError,
    SolverConfig,
    SplitProblem,
    TraceRecord,
    resolve_step_size,
)

logger = logging.getLogger(__name__)


@dataclass
class SolveResult:
    y_final: np.ndarray
    x_final: np.ndarray
    iters: int
    converged: bool
    trace: List[TraceRecord]
    gamma_used: float
    # populated only when config.check_inequalities is set
    reports: list = field(default_factory=list)

    @property
    def final_gmap_norm(self) -> float:
        return self.trace[-1].gmap_norm


def _finite(arr, oracle):
    if not np.all(np.isfinite(arr)):
        raise NumericalError(oracle)
    return arr


def tos_step(problem: SplitProblem, gamma: float, y) -> IterateState:
    y = np.asarray(y, dtype=float)
    if y.shape != (problem.dim,):
        raise ValueError(f"expected vector of shape ({problem.dim},), got {y.shape}")
    x = _finite(np.asarray(problem.g.prox(gamma, y), dtype=float), f"g ({problem.g.name}) prox")
    grad_fx = _finite(np.asarray(problem.f.grad(x), dtype=float), f"f ({problem.f.name}) grad")
    z = _finite(
        np.asarray(problem.h.prox(gamma, 2 * x - y - gamma * grad_fx), dtype=float),
        f"h ({problem.h.name}) prox",
    )
    y_next = y - x + z
    gmap = (x - z) / gamma
    return IterateState(y=y, x=x, z=z, y_next=y_next, gmap=gmap, gamma=gamma, grad_fx=grad_fx)


def gradient_mapping(problem: SplitProblem, gamma: float, y) -> np.ndarray:
    return tos_step(problem, gamma, y).gmap


def construct_fixed_point(x_star, u, gamma: float) -> np.ndarray:
    """Return y* = x* + gamma u for a minimizer x* and u in the subdifferential
    of g at x* chosen so that -grad f(x*) - u lies in the subdifferential of h.
    """
    return np.asarray(x_star, dtype=float) + gamma * np.asarray(u, dtype=float)


def _record(problem, state, k, y_ref):
    x = state.x
    objective = problem.objective(x)
    dist = None if y_ref is None else float(np.linalg.norm(state.y - y_ref))
    return TraceRecord(
        iter=k,
        gmap_norm=float(np.linalg.norm(state.gmap)),
        objective=objective,
        infeas=float(np.linalg.norm(x - state.z)),
        dist_to_ref=dist,
    )


def solve(
    problem: SplitProblem,
    config: Optional[SolverConfig] = None,
    y0=None,
    y_ref=None,
) -> SolveResult:
    """Run the splitting iteration from ``y0`` (zero by default).

    With ``config.check_inequalities`` the per-step inequalities are
    certified inline: master inequality on consecutive iterates, monotone
    gradient mapping, and, when ``y_ref`` is given, decreasing distance to
    ``y_ref`` and the O(1/k) bound. The first violation raises
    :class:`InequalityViolation` carrying the partial result.
    """
    from . import diagnostics

    config = config or SolverConfig()
    L = problem.f.lipschitz
    gamma = resolve_step_size(config, L)
    y = np.zeros(problem.dim) if y0 is None else np.array(y0, dtype=float)
    if y.shape != (problem.dim,) or not np.all(np.isfinite(y)):
        raise ValueError("y0 must be a finite vector of length problem.dim")
    y_start = y.copy()
    if y_ref is not None:
        y_ref = np.asarray(y_ref, dtype=float)
        if config.check_inequalities:
            diagnostics.validate_reference(problem, gamma, y_ref)

    check = config.check_inequalities
    trace: List[TraceRecord] = []
    reports: list = []
    d0_sq = None if y_ref is None else float(np.sum((y_start - y_ref) ** 2))

    def partial(state, k):
        return SolveResult(
            y_final=state.y, x_final=state.x, iters=k, converged=False,
            trace=trace, gamma_used=gamma, reports=reports,
        )

    def certify(rep, state, k):
        reports.append(rep)
        if not rep.passed:
            raise InequalityViolation(rep, partial(state, k))

    state = tos_step(problem, gamma, y)
    k = 0
    while True:
        gnorm = float(np.linalg.norm(state.gmap))
        if check and d0_sq is not None:
            certify(diagnostics.rate_bound_report(k, gnorm, d0_sq, gamma, L), state, k)
        done = gnorm <= config.tol or k >= config.max_iter
        if k % config.trace_every == 0 or done:
            trace.append(_record(problem, state, k, y_ref))
        if done:
            break
        nxt = tos_step(problem, gamma, state.y_next)
        if check:
            certify(diagnostics.master_from_states(state, nxt, location=k), state, k)
            certify(diagnostics.gm_monotone_from_states(state, nxt, L, location=k), state, k)
            if y_ref is not None:
                certify(diagnostics.distance_from_state(state, y_ref, L, location=k), state, k)
        state = nxt
        k += 1

    converged = trace[-1].gmap_norm <= config.tol
    logger.debug("solve finished: iters=%d converged=%s |G|=%.3e", k, converged, trace[-1].gmap_norm)
    return SolveResult(
        y_final=state.y,
        x_final=state.x,
        iters=k,
        converged=converged,
        trace=trace,
        gamma_used=gamma,
        reports=reports,
    )
