"""Seeded problem families for experiments and tests."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import oracle
from .core import ConfigurationError, SplitProblem
from .prox import project_box, prox_group_l1, prox_l1, prox_tv2d_cols, prox_tv2d_rows, prox_zero
from .smooth import LeastSquaresSpec, LogisticSpec, least_squares, logistic, zero_smooth
from .solver import construct_fixed_point, gradient_mapping

# a reference is kept only if the fixed-point construction is this accurate
REFERENCE_GMAP_TOL = 1e-8


@dataclass(frozen=True)
class Reference:
    """A known minimizer x* together with u in the subdifferential of g at x*
    such that -grad f(x*) - u lies in the subdifferential of h at x*."""

    x_star: np.ndarray
    u: np.ndarray

    def y_star(self, gamma: float) -> np.ndarray:
        return construct_fixed_point(self.x_star, self.u, gamma)


@dataclass
class Instance:
    problem: SplitProblem
    reference: Optional[Reference] = None
    y0: Optional[np.ndarray] = None
    note: str = ""


def _require_int(name, value, minimum=1):
    if int(value) != value or value < minimum:
        raise ConfigurationError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def lasso_data(n, p, seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, p)) / np.sqrt(n)
    x_true = np.zeros(p)
    support = rng.choice(p, size=max(1, p // 10), replace=False)
    x_true[support] = rng.standard_normal(support.size) * 2.0
    b = A @ x_true + 0.1 * rng.standard_normal(n)
    return A, b


def lasso(n, p, lam, seed) -> Instance:
    """0.5 ||Ax - b||^2 + lam ||x||_1 with g = l1 and h = 0."""
    n = _require_int("n", n)
    p = _require_int("p", p)
    A, b = lasso_data(n, p, seed)
    f = least_squares(LeastSquaresSpec(A, b))
    problem = SplitProblem(f=f, g=prox_l1(lam), h=prox_zero(), dim=p)
    x_star = oracle.lasso_reference(A, b, lam)
    ref = Reference(x_star=x_star, u=-f.grad(x_star))
    return _verified(Instance(problem, ref))


def overlapping_group_lasso(p, group_size, overlap, lam, seed) -> Instance:
    """Least squares plus a group lasso whose groups overlap.

    g uses consecutive blocks of ``group_size``; h uses the same blocks
    shifted by ``group_size - overlap`` (the first block is shorter), so
    each h-block shares ``overlap`` coordinates with one g-block.
    """
    p = _require_int("p", p)
    group_size = _require_int("group_size", group_size)
    overlap = _require_int("overlap", overlap)
    if not overlap < group_size:
        raise ConfigurationError("overlap must be smaller than group_size")
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((p, p)) / np.sqrt(p)
    b = rng.standard_normal(p)
    groups_g = [list(range(i, min(i + group_size, p))) for i in range(0, p, group_size)]
    shift = group_size - overlap
    starts = [0] + list(range(shift, p, group_size))
    groups_h = [list(range(s, min(e, p))) for s, e in zip(starts, starts[1:] + [p])]
    groups_h = [gr for gr in groups_h if gr]
    problem = SplitProblem(
        f=least_squares(LeastSquaresSpec(A, b)),
        g=prox_group_l1(groups_g, lam),
        h=prox_group_l1(groups_h, lam),
        dim=p,
    )
    return Instance(problem, note="no reference available")


def tv2d_image(rows, cols, noise_seed, noise=0.2):
    rng = np.random.default_rng(noise_seed)
    img = np.zeros((rows, cols))
    img[rows // 4: 3 * rows // 4, cols // 4: 3 * cols // 4] = 1.0
    img[: rows // 2, 3 * cols // 4:] = -0.5
    return img + noise * rng.standard_normal((rows, cols))


def tv2d(rows, cols, lam, noise_seed) -> Instance:
    """Anisotropic 2-D TV denoising: rows go to g, columns to h."""
    rows = _require_int("rows", rows)
    cols = _require_int("cols", cols)
    noisy = tv2d_image(rows, cols, noise_seed).ravel()
    problem = SplitProblem(
        f=least_squares(LeastSquaresSpec(np.eye(rows * cols), noisy)),
        g=prox_tv2d_rows((rows, cols), lam),
        h=prox_tv2d_cols((rows, cols), lam),
        dim=rows * cols,
    )
    return Instance(problem, note="no reference available")


def box_intersection(p, boxes, seed) -> Instance:
    """Find a point in the intersection of two boxes (f = 0).

    ``boxes`` is a pair of ``[lo, hi]`` entries, each bound a scalar or a
    length-p list. The seed draws the starting point.
    """
    p = _require_int("p", p)
    if len(boxes) != 2:
        raise ConfigurationError("box_intersection needs exactly two boxes")
    bounds = []
    for lo, hi in boxes:
        lo = np.broadcast_to(np.asarray(lo, dtype=float), (p,)).copy()
        hi = np.broadcast_to(np.asarray(hi, dtype=float), (p,)).copy()
        bounds.append((lo, hi))
    rng = np.random.default_rng(seed)
    y0 = 3.0 * rng.standard_normal(p)
    problem = SplitProblem(
        f=zero_smooth(p), g=project_box(*bounds[0]), h=project_box(*bounds[1]), dim=p
    )
    x_star = oracle.box_intersection_point(bounds)
    if x_star is None:
        return Instance(problem, y0=y0, note="no reference available: boxes are disjoint")
    return _verified(Instance(problem, Reference(x_star, np.zeros(p)), y0=y0))


def logistic_l1(n, p, lam, seed) -> Instance:
    n = _require_int("n", n)
    p = _require_int("p", p)
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, p))
    w = rng.standard_normal(p)
    labels = np.where(A @ w + 0.5 * rng.standard_normal(n) >= 0, 1.0, -1.0)
    problem = SplitProblem(
        f=logistic(LogisticSpec(A, labels)), g=prox_l1(lam), h=prox_zero(), dim=p
    )
    return Instance(problem, note="no reference available")


def _verified(inst: Instance) -> Instance:
    L = inst.problem.f.lipschitz
    gamma = 4.0 / (3.0 * L) if L > 0 else 1.0
    gnorm = float(np.linalg.norm(gradient_mapping(inst.problem, gamma, inst.reference.y_star(gamma))))
    if gnorm > REFERENCE_GMAP_TOL:
        return Instance(inst.problem, None, inst.y0, f"no reference available: ||G(y*)||={gnorm:.2e}")
    return inst


FAMILIES = {
    "lasso": (lasso, ("n", "p", "lambda", "seed")),
    "overlapping_group_lasso": (overlapping_group_lasso, ("p", "group_size", "overlap", "lambda", "seed")),
    "tv2d": (tv2d, ("rows", "cols", "lambda", "noise_seed")),
    "box_intersection": (box_intersection, ("p", "boxes", "seed")),
    "logistic_l1": (logistic_l1, ("n", "p", "lambda", "seed")),
}
