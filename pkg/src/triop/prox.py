"""Catalog of proximal operators and projections.

Every constructor returns a :class:`~triop.core.ProxOracle`. The ``eval``
functions reduce over the last axis, so they accept a single vector or a
stack of vectors (the grid oracle relies on this).
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .core import ConfigurationError, ProxOracle

# slack on the simplex equality constraint when evaluating the indicator
SIMPLEX_FEAS_TOL = 1e-9


def _as_value(values):
    values = np.asarray(values, dtype=float)
    return float(values) if values.ndim == 0 else values


def prox_zero() -> ProxOracle:
    def prox(gamma, v):
        return np.array(v, dtype=float, copy=True)

    def value(v):
        v = np.asarray(v, dtype=float)
        return _as_value(np.zeros(v.shape[:-1]))

    return ProxOracle(prox=prox, eval=value, name="zero")


def soft_threshold(v, thresh):
    v = np.asarray(v, dtype=float)
    return np.sign(v) * np.maximum(np.abs(v) - thresh, 0.0)


def prox_l1(lam: float) -> ProxOracle:
    """lam * ||x||_1, prox by soft-thresholding."""
    if not lam >= 0:
        raise ConfigurationError(f"lambda must be nonnegative, got {lam}")
    lam = float(lam)

    def prox(gamma, v):
        return soft_threshold(v, gamma * lam)

    def value(v):
        return _as_value(lam * np.sum(np.abs(v), axis=-1))

    return ProxOracle(prox=prox, eval=value, name=f"l1({lam:g})")


def _check_partition(groups: Sequence[Sequence[int]]):
    blocks = [np.asarray(g, dtype=int).ravel() for g in groups]
    if not blocks or any(b.size == 0 for b in blocks):
        raise ConfigurationError("groups must be a non-empty list of non-empty index sets")
    flat = np.concatenate(blocks)
    if np.unique(flat).size != flat.size:
        raise ConfigurationError("groups overlap: each index must belong to exactly one group")
    if flat.min() != 0 or flat.max() != flat.size - 1:
        raise ConfigurationError(
            "groups must partition the indices 0..p-1 (some index is missing)"
        )
    return blocks, flat.size


def prox_group_l1(groups: Sequence[Sequence[int]], lam: float) -> ProxOracle:
    """lam * sum_b ||x_b||_2 over a partition of the coordinates.

    Overlapping group penalties are handled by splitting the groups into
    two partitions, one assigned to g and the other to h.
    """
    if not lam >= 0:
        raise ConfigurationError(f"lambda must be nonnegative, got {lam}")
    lam = float(lam)
    blocks, p = _check_partition(groups)

    def prox(gamma, v):
        v = np.asarray(v, dtype=float)
        if v.shape[-1] != p:
            raise ConfigurationError(f"expected vector of length {p}, got {v.shape[-1]}")
        out = np.zeros_like(v)
        t = gamma * lam
        for b in blocks:
            vb = v[..., b]
            norm = np.linalg.norm(vb)
            if norm > t:
                out[..., b] = vb * (1.0 - t / norm)
        return out

    def value(v):
        v = np.asarray(v, dtype=float)
        total = sum(np.linalg.norm(v[..., b], axis=-1) for b in blocks)
        return _as_value(lam * total)

    return ProxOracle(prox=prox, eval=value, name=f"group_l1({lam:g})")


def project_box(lo, hi) -> ProxOracle:
    """Indicator of {lo <= x <= hi}; bounds may be scalars or vectors."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if np.any(lo > hi):
        raise ConfigurationError("box bounds must satisfy lo <= hi")

    def prox(gamma, v):
        return np.clip(np.asarray(v, dtype=float), lo, hi)

    def value(v):
        v = np.asarray(v, dtype=float)
        inside = np.all((v >= lo) & (v <= hi), axis=-1)
        return _as_value(np.where(inside, 0.0, np.inf))

    return ProxOracle(prox=prox, eval=value, name="box", is_projection=True)


def simplex_projection(v) -> np.ndarray:
    """Euclidean projection onto {u >= 0, sum(u) = 1} by sort-and-threshold.

    Sorting is stable, so ties keep their original index order.
    """
    v = np.asarray(v, dtype=float)
    order = np.argsort(-v, kind="stable")
    mu = v[order]
    css = np.cumsum(mu) - 1.0
    ind = np.arange(1, v.size + 1)
    rho = np.nonzero(mu - css / ind > 0)[0][-1]
    theta = css[rho] / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


def project_simplex() -> ProxOracle:
    def prox(gamma, v):
        return simplex_projection(v)

    def value(v):
        v = np.asarray(v, dtype=float)
        inside = np.all(v >= 0, axis=-1) & (np.abs(np.sum(v, axis=-1) - 1.0) <= SIMPLEX_FEAS_TOL)
        return _as_value(np.where(inside, 0.0, np.inf))

    return ProxOracle(prox=prox, eval=value, name="simplex", is_projection=True)


def tv1d_denoise(v, lam: float) -> np.ndarray:
    """Exact solution of min_u 0.5 ||u - v||^2 + lam * sum_i |u_{i+1} - u_i|.

    Direct non-iterative method of Condat (2013): scans the signal once,
    maintaining the range of admissible values for the current segment
    and backtracking to the last breakpoint when a jump is forced.
    """
    v = np.asarray(v, dtype=float)
    n = v.size
    if n == 0:
        return v.copy()
    if lam <= 0 or n == 1:
        return v.copy()
    inp = v.tolist()
    out = [0.0] * n
    lam = float(lam)
    minlam = -lam
    twolam = 2.0 * lam
    k = k0 = 0
    kplus = kminus = 0
    umin, umax = lam, minlam
    vmin, vmax = inp[0] - lam, inp[0] + lam
    while True:
        while k == n - 1:
            if umin < 0.0:
                # vmin too high: negative jump
                while True:
                    out[k0] = vmin
                    k0 += 1
                    if k0 > kminus:
                        break
                k = kminus = k0
                vmin = inp[k0]
                umin = lam
                umax = vmin + umin - vmax
            elif umax > 0.0:
                # vmax too low: positive jump
                while True:
                    out[k0] = vmax
                    k0 += 1
                    if k0 > kplus:
                        break
                k = kplus = k0
                vmax = inp[k0]
                umax = minlam
                umin = vmax + umax - vmin
            else:
                vmin += umin / (k - k0 + 1)
                while k0 <= k:
                    out[k0] = vmin
                    k0 += 1
                return np.array(out)
        umin += inp[k + 1] - vmin
        if umin < minlam:
            while True:
                out[k0] = vmin
                k0 += 1
                if k0 > kminus:
                    break
            k = kplus = kminus = k0
            vmin = inp[k0]
            vmax = vmin + twolam
            umin, umax = lam, minlam
            continue
        umax += inp[k + 1] - vmax
        if umax > lam:
            while True:
                out[k0] = vmax
                k0 += 1
                if k0 > kplus:
                    break
            k = kplus = kminus = k0
            vmax = inp[k0]
            vmin = vmax - twolam
            umin, umax = lam, minlam
            continue
        k += 1
        if umin >= lam:
            kminus = k
            vmin += (umin - lam) / (kminus - k0 + 1)
            umin = lam
        if umax <= minlam:
            kplus = k
            vmax += (umax + lam) / (kplus - k0 + 1)
            umax = minlam


def tv1d_value(v):
    return np.sum(np.abs(np.diff(np.asarray(v, dtype=float), axis=-1)), axis=-1)


def prox_tv1d(lam: float) -> ProxOracle:
    """lam * sum_i |x_{i+1} - x_i| (anisotropic 1-D total variation)."""
    if not lam >= 0:
        raise ConfigurationError(f"lambda must be nonnegative, got {lam}")
    lam = float(lam)

    def prox(gamma, v):
        return tv1d_denoise(v, gamma * lam)

    def value(v):
        return _as_value(lam * tv1d_value(v))

    return ProxOracle(prox=prox, eval=value, name=f"tv1d({lam:g})")


def _tv2d_axis(shape, lam, axis):
    rows, cols = shape
    if rows < 1 or cols < 1:
        raise ConfigurationError(f"invalid image shape {shape}")
    if not lam >= 0:
        raise ConfigurationError(f"lambda must be nonnegative, got {lam}")
    lam = float(lam)

    def prox(gamma, v):
        img = np.asarray(v, dtype=float).reshape(rows, cols)
        if axis == 1:
            out = np.vstack([tv1d_denoise(r, gamma * lam) for r in img])
        else:
            out = np.vstack([tv1d_denoise(c, gamma * lam) for c in img.T]).T
        return out.ravel()

    def value(v):
        v = np.asarray(v, dtype=float)
        img = v.reshape(v.shape[:-1] + (rows, cols))
        tv = np.sum(np.abs(np.diff(img, axis=-1 if axis == 1 else -2)), axis=(-2, -1))
        return _as_value(lam * tv)

    name = "tv_rows" if axis == 1 else "tv_cols"
    return ProxOracle(prox=prox, eval=value, name=f"{name}({lam:g})")


def prox_tv2d_rows(shape, lam: float) -> ProxOracle:
    """Total variation along each row of a row-major flattened image."""
    return _tv2d_axis(shape, lam, axis=1)


def prox_tv2d_cols(shape, lam: float) -> ProxOracle:
    """Total variation along each column of a row-major flattened image."""
    return _tv2d_axis(shape, lam, axis=0)
