"""Numerical certificates for the convergence inequalities of the splitting.

Each check returns an :class:`InequalityReport` whose ``residual`` is the
slack of the inequality (right side subtracted from the left so that a
nonnegative value means it holds). A report passes when
``residual >= -REL_TOL * scale`` with ``scale = max(1, |terms|)``.

* ``master``: <gG(y) - gG(y'), y - y'> >= ||gG(y) - gG(y')||^2
  + g <grad f(x) - grad f(x'), z - z'>   (g is the step size)
* ``gm_monotone``: ||G(y+)||^2 <= ||G(y)||^2 - (1 - gL/2) ||G(y+) - G(y)||^2
* ``dist_decrease``: ||y+ - y*||^2 <= ||y - y*||^2 - g^2 (1 - gL/2) ||G(y)||^2
* ``rate_bound``: ||G(y^k)||^2 <= 2 ||y^0 - y*||^2 / (g^2 (2 - gL) (k + 1))
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, List, Optional, Sequence

import numpy as np

from .core import ConfigurationError, InvalidReferenceError, IterateState, SplitProblem, TraceRecord
from .solver import tos_step

REL_TOL = 1e-9
REFERENCE_TOL = 1e-10

NAMES = ("master", "gm_monotone", "dist_decrease", "rate_bound")


@dataclass(frozen=True)
class InequalityReport:
    name: str
    residual: float
    location: Optional[Hashable]
    passed: bool
    scale: float = 1.0


def make_report(name, residual, terms, location=None, rel_tol=REL_TOL) -> InequalityReport:
    scale = max([1.0] + [abs(float(t)) for t in terms])
    residual = float(residual)
    return InequalityReport(
        name=name,
        residual=residual,
        location=location,
        passed=bool(residual >= -rel_tol * scale),
        scale=scale,
    )


def master_from_states(s: IterateState, t: IterateState, location=None) -> InequalityReport:
    gamma = s.gamma
    dg = gamma * (s.gmap - t.gmap)
    lhs = float(dg @ (s.y - t.y))
    sq = float(dg @ dg)
    cross = gamma * float((s.grad_fx - t.grad_fx) @ (s.z - t.z))
    return make_report("master", lhs - sq - cross, (lhs, sq, cross), location)


def check_master_inequality(problem: SplitProblem, gamma: float, y, y_tilde, location=None) -> InequalityReport:
    return master_from_states(tos_step(problem, gamma, y), tos_step(problem, gamma, y_tilde), location)


def gm_monotone_from_states(s: IterateState, s_next: IterateState, L: float, location=None) -> InequalityReport:
    g0 = float(s.gmap @ s.gmap)
    g1 = float(s_next.gmap @ s_next.gmap)
    diff = s_next.gmap - s.gmap
    pen = (1.0 - s.gamma * L / 2.0) * float(diff @ diff)
    return make_report("gm_monotone", g0 - pen - g1, (g0, pen, g1), location)


def check_gm_monotone(problem: SplitProblem, gamma: float, L: float, y, location=None) -> InequalityReport:
    s = tos_step(problem, gamma, y)
    return gm_monotone_from_states(s, tos_step(problem, gamma, s.y_next), L, location)


def validate_reference(problem: SplitProblem, gamma: float, y_star, tol=REFERENCE_TOL) -> float:
    """Raise InvalidReferenceError unless ||G(y_star)|| <= tol; return the norm."""
    gnorm = float(np.linalg.norm(tos_step(problem, gamma, y_star).gmap))
    if not gnorm <= tol:
        raise InvalidReferenceError(
            f"reference point is not a fixed point: ||G(y*)|| = {gnorm:.3e} > {tol:.1e}"
        )
    return gnorm


def distance_from_state(s: IterateState, y_star, L: float, location=None) -> InequalityReport:
    d0 = float(np.sum((s.y - y_star) ** 2))
    d1 = float(np.sum((s.y_next - y_star) ** 2))
    dec = s.gamma**2 * (1.0 - s.gamma * L / 2.0) * float(s.gmap @ s.gmap)
    return make_report("dist_decrease", d0 - dec - d1, (d0, dec, d1), location)


def check_distance_decrease(problem: SplitProblem, gamma: float, L: float, y, y_star, location=None) -> InequalityReport:
    y_star = np.asarray(y_star, dtype=float)
    validate_reference(problem, gamma, y_star)
    return distance_from_state(tos_step(problem, gamma, y), y_star, L, location)


def rate_bound(k, d0_sq: float, gamma: float, L: float):
    """2 ||y^0 - y*||^2 / (gamma^2 (2 - gamma L) (k + 1))."""
    k = np.asarray(k, dtype=float)
    return 2.0 * d0_sq / (gamma**2 * (2.0 - gamma * L) * (k + 1.0))


def _check_step(gamma, L):
    if L > 0 and not gamma * L < 2.0:
        raise ConfigurationError(f"gamma must satisfy gamma < 2/L (got gamma={gamma:.6g}, L={L:.6g})")


def rate_bound_report(k: int, gmap_norm: float, d0_sq: float, gamma: float, L: float) -> InequalityReport:
    bound = float(rate_bound(k, d0_sq, gamma, L))
    g2 = gmap_norm**2
    return make_report("rate_bound", bound - g2, (bound, g2), k)


def check_rate_bound(trace: Sequence[TraceRecord], y0, y_star, gamma: float, L: float) -> List[InequalityReport]:
    _check_step(gamma, L)
    d0_sq = float(np.sum((np.asarray(y0, dtype=float) - np.asarray(y_star, dtype=float)) ** 2))
    return [rate_bound_report(r.iter, r.gmap_norm, d0_sq, gamma, L) for r in trace]


def firm_nonexpansiveness_residual(T, v, w) -> float:
    """<T(v) - T(w), v - w> - ||T(v) - T(w)||^2; nonnegative for proximal maps."""
    d = np.asarray(T(v)) - np.asarray(T(w))
    return float(d @ (np.asarray(v) - np.asarray(w))) - float(d @ d)
