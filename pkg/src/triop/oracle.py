"""Reference solvers used as ground truth.

Nothing here imports the splitting solver, so agreement between the two is
a genuine cross-check.
"""

from __future__ import annotations

from typing import Callable, List, Sequence, Tuple

import numpy as np

GRID_MAX_DIM = 3
GRID_CHUNK = 2_000_000


class OracleError(RuntimeError):
    pass


def _soft(v, t):
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


def lasso_stationarity(A, b, lam, x) -> float:
    """Max violation of the lasso subgradient conditions at ``x``."""
    grad = A.T @ (A @ x - b)
    on = x != 0
    res = np.where(on, np.abs(grad + lam * np.sign(x)), np.maximum(np.abs(grad) - lam, 0.0))
    return float(np.max(res)) if res.size else 0.0


def lasso_coordinate_descent(A, b, lam: float, tol: float = 1e-12, max_sweeps: int = 100_000) -> np.ndarray:
    """Cyclic coordinate descent for 0.5 ||Ax - b||^2 + lam ||x||_1."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    n, p = A.shape
    col_sq = np.einsum("ij,ij->j", A, A)
    if np.any(col_sq == 0):
        raise OracleError("coordinate descent requires nonzero columns")
    x = np.zeros(p)
    r = b.copy()
    for sweep in range(max_sweeps):
        for j in range(p):
            aj = A[:, j]
            rho = aj @ r + col_sq[j] * x[j]
            new = _soft(rho, lam) / col_sq[j]
            if new != x[j]:
                r -= aj * (new - x[j])
                x[j] = new
        # recompute the residual now and then to limit drift
        if sweep % 50 == 49:
            r = b - A @ x
        if lasso_stationarity(A, b, lam, x) <= tol:
            return x
    raise OracleError(f"coordinate descent did not reach tol={tol:g} in {max_sweeps} sweeps")


def polish_lasso(A, b, lam: float, x) -> np.ndarray:
    """Re-solve the optimality system on the support and sign pattern of ``x``.

    Returns the polished point when it keeps the sign pattern and improves
    stationarity, otherwise ``x`` unchanged.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    x = np.asarray(x, dtype=float)
    support = np.flatnonzero(x)
    if support.size == 0:
        return x.copy()
    s = np.sign(x[support])
    As = A[:, support]
    sol, *_ = np.linalg.lstsq(As.T @ As, As.T @ b - lam * s, rcond=None)
    if not np.all(np.sign(sol) == s):
        return x.copy()
    cand = np.zeros_like(x)
    cand[support] = sol
    if lasso_stationarity(A, b, lam, cand) <= lasso_stationarity(A, b, lam, x):
        return cand
    return x.copy()


def lasso_reference(A, b, lam: float, tol: float = 1e-12) -> np.ndarray:
    return polish_lasso(A, b, lam, lasso_coordinate_descent(A, b, lam, tol=tol))


def grid_minimize(
    objective: Callable,
    box: Sequence[Tuple[float, float]],
    step: float = 1e-3,
    vectorized: bool = True,
) -> np.ndarray:
    """Exhaustive search over the grid lo + i*step inside ``box``.

    With ``vectorized`` the objective receives an (N, p) array and returns N
    values; otherwise it is called once per point. Ties go to the first
    point in lexicographic index order.
    """
    p = len(box)
    if p > GRID_MAX_DIM:
        raise ValueError(f"grid search supports p <= {GRID_MAX_DIM}, got {p}")
    axes = []
    for lo, hi in box:
        if not (np.isfinite(lo) and np.isfinite(hi) and lo <= hi):
            raise ValueError("grid box must be finite with lo <= hi")
        count = int(np.floor((hi - lo) / step + 1e-9)) + 1
        axes.append(lo + step * np.arange(count))
    shape = tuple(a.size for a in axes)
    total = int(np.prod(shape))
    best_val, best_idx = np.inf, 0
    for start in range(0, total, GRID_CHUNK):
        flat = np.arange(start, min(start + GRID_CHUNK, total))
        idx = np.unravel_index(flat, shape)
        pts = np.stack([axes[d][idx[d]] for d in range(p)], axis=-1)
        if vectorized:
            vals = np.asarray(objective(pts), dtype=float)
        else:
            vals = np.array([objective(pt) for pt in pts], dtype=float)
        i = int(np.argmin(vals))
        if vals[i] < best_val:
            best_val, best_idx = vals[i], start + i
    if not np.isfinite(best_val):
        raise OracleError("objective is infinite on the whole grid")
    idx = np.unravel_index(best_idx, shape)
    return np.array([axes[d][idx[d]] for d in range(p)])


def prox_by_grid(phi_eval: Callable, gamma: float, v, box, step: float = 1e-3) -> np.ndarray:
    """Grid minimizer of phi(u) + ||u - v||^2 / (2 gamma)."""
    v = np.asarray(v, dtype=float)

    def obj(u):
        return phi_eval(u) + np.sum((u - v) ** 2, axis=-1) / (2.0 * gamma)

    return grid_minimize(obj, box, step)


def proximal_gradient_reference(f, h, gamma: float, x0, iters: int) -> List[np.ndarray]:
    """Iterates of x+ = prox_{gamma h}(x - gamma grad f(x)), x0 included."""
    x = np.array(x0, dtype=float)
    out = [x]
    for _ in range(iters):
        x = np.asarray(h.prox(gamma, x - gamma * f.grad(x)), dtype=float)
        out.append(x)
    return out


def douglas_rachford_reference(g, h, gamma: float, y0, iters: int) -> List[np.ndarray]:
    """Iterates of y+ = y - prox_{gamma g}(y) + prox_{gamma h}(2 prox_{gamma g}(y) - y)."""
    y = np.array(y0, dtype=float)
    out = [y]
    for _ in range(iters):
        x = np.asarray(g.prox(gamma, y), dtype=float)
        y = y - x + np.asarray(h.prox(gamma, 2 * x - y), dtype=float)
        out.append(y)
    return out


def box_intersection_point(boxes) -> np.ndarray:
    """Midpoint of the intersection of axis-aligned boxes, or None if empty."""
    lo = np.max([np.asarray(b[0], dtype=float) for b in boxes], axis=0)
    hi = np.min([np.asarray(b[1], dtype=float) for b in boxes], axis=0)
    if np.any(lo > hi):
        return None
    return 0.5 * (lo + hi)


__all__ = [
    "OracleError",
    "box_intersection_point",
    "douglas_rachford_reference",
    "grid_minimize",
    "lasso_coordinate_descent",
    "lasso_reference",
    "lasso_stationarity",
    "polish_lasso",
    "prox_by_grid",
    "proximal_gradient_reference",
]
