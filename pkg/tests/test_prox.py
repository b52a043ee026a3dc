import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.optimize import lsq_linear

from triop.core import ConfigurationError
from triop.diagnostics import firm_nonexpansiveness_residual
from triop.oracle import grid_minimize, prox_by_grid
from triop.prox import (
    project_box,
    project_simplex,
    prox_group_l1,
    prox_l1,
    prox_tv1d,
    prox_tv2d_cols,
    prox_tv2d_rows,
    prox_zero,
    simplex_projection,
    tv1d_denoise,
)


def catalog(p):
    """Every catalog operator instantiated for dimension p."""
    groups = [list(range(i, min(i + 3, p))) for i in range(0, p, 3)]
    ops = {
        "zero": prox_zero(),
        "l1": prox_l1(0.7),
        "group_l1": prox_group_l1(groups, 0.9),
        "box": project_box(-0.5, np.linspace(0.0, 1.0, p)),
        "simplex": project_simplex(),
        "tv1d": prox_tv1d(0.6),
    }
    for rows in (2, 4, 5):
        if p % rows == 0 and p > rows:
            ops["tv_rows"] = prox_tv2d_rows((rows, p // rows), 0.4)
            ops["tv_cols"] = prox_tv2d_cols((rows, p // rows), 0.4)
            break
    return ops


def tv1d_dual_oracle(v, t):
    """Prox of t*TV through its box-constrained dual, solved by BVLS."""
    v = np.asarray(v, dtype=float)
    if v.size < 2:
        return v.copy()
    D = np.diff(np.eye(v.size), axis=0)
    w = lsq_linear(D.T, v, bounds=(-t, t), method="bvls", tol=1e-14).x
    return v - D.T @ w


def grid_box(center, half, rng, step=1e-3):
    """Box of half-width ``half`` around ``center``, shifted off the grid
    by a random sub-step offset. Offsets sum to zero so the plane
    sum(u) = 1 still passes through grid points."""
    p = center.size
    shift = rng.uniform(-0.5, 0.5, p) * step
    shift -= shift.mean() if p > 1 else shift
    return [(c + d - half, c + d + half) for c, d in zip(center, shift)]


# --- closed-form examples -------------------------------------------------

def test_zero_prox_is_identity():
    op = prox_zero()
    np.testing.assert_array_equal(op.prox(1.0, np.array([3.0, -2.0])), [3.0, -2.0])
    np.testing.assert_array_equal(op.prox(0.01, np.array([0.0])), [0.0])
    assert op.eval(np.array([5.0, 5.0])) == 0.0


def test_l1_soft_threshold():
    np.testing.assert_allclose(prox_l1(1.0).prox(1.0, np.array([2.0, -0.5, 0.0])), [1.0, 0.0, 0.0])
    np.testing.assert_allclose(prox_l1(2.0).prox(0.5, np.array([1.5])), [0.5])
    v = np.array([0.3, -4.0, 2.0])
    np.testing.assert_array_equal(prox_l1(0.0).prox(3.0, v), v)
    assert prox_l1(2.0).eval(v) == pytest.approx(2.0 * 6.3)


def test_l1_rejects_negative_lambda():
    with pytest.raises(ConfigurationError):
        prox_l1(-1.0)


def test_group_shrinkage():
    op = prox_group_l1([[0, 1]], 1.0)
    np.testing.assert_allclose(op.prox(1.0, np.array([3.0, 4.0])), [2.4, 3.2], rtol=1e-15)
    assert op.eval(np.array([3.0, 4.0])) == pytest.approx(5.0)


def test_group_zero_block_maps_to_zero():
    op = prox_group_l1([[0, 1], [2]], 1.0)
    np.testing.assert_array_equal(op.prox(1.0, np.array([0.0, 0.0, 5.0])), [0.0, 0.0, 4.0])


def test_group_lambda_zero_is_identity():
    v = np.array([0.1, -2.0, 3.0])
    np.testing.assert_array_equal(prox_group_l1([[0], [1, 2]], 0.0).prox(1.0, v), v)


@pytest.mark.parametrize("groups", [[[0, 1], [1, 2]], [[0, 1], [3]], [[0], []]])
def test_group_rejects_non_partition(groups):
    with pytest.raises(ConfigurationError):
        prox_group_l1(groups, 1.0)


def test_box_clamps():
    op = project_box(0.0, 1.0)
    np.testing.assert_array_equal(op.prox(0.3, np.array([-0.5, 2.0, 0.3])), [0.0, 1.0, 0.3])
    assert op.eval(np.array([2.0])) == np.inf
    assert op.eval(np.array([0.5])) == 0.0


def test_box_rejects_inverted_bounds():
    with pytest.raises(ConfigurationError):
        project_box(1.0, 0.0)


def test_simplex_examples():
    op = project_simplex()
    np.testing.assert_allclose(op.prox(1.0, np.array([0.2, 0.8])), [0.2, 0.8], atol=1e-15)
    np.testing.assert_array_equal(op.prox(1.0, np.array([10.0, 0.0])), [1.0, 0.0])


def test_simplex_projection_matches_grid_on_segment():
    v = np.array([0.4, 0.4])
    # parametrize the 1-simplex as (t, 1 - t)
    t = np.linspace(0.0, 1.0, 100001)
    dist = (t - v[0]) ** 2 + (1 - t - v[1]) ** 2
    grid = np.array([t[np.argmin(dist)], 1 - t[np.argmin(dist)]])
    np.testing.assert_allclose(grid, [0.5, 0.5], atol=1e-5)
    np.testing.assert_allclose(simplex_projection(v), grid, atol=1e-5)


def test_simplex_ties_are_deterministic():
    v = np.array([0.5, 0.5, 0.5, -1.0])
    np.testing.assert_allclose(simplex_projection(v), [1 / 3, 1 / 3, 1 / 3, 0.0])


def test_tv_constant_signal_unchanged():
    for lam in (0.1, 1.0, 100.0):
        np.testing.assert_allclose(tv1d_denoise([2.5, 2.5, 2.5], lam), [2.5] * 3, rtol=0, atol=1e-13)


def test_tv_two_point_closed_form():
    # the jump of 2 shrinks by 2*t, capped at the mean
    np.testing.assert_allclose(tv1d_denoise([0.0, 2.0], 0.5), [0.5, 1.5], atol=1e-15)
    np.testing.assert_allclose(tv1d_denoise([0.0, 2.0], 1.0), [1.0, 1.0], atol=1e-15)
    op = prox_tv1d(1.0)
    for gamma, expected in [(0.5, [0.5, 1.5]), (1.0, [1.0, 1.0])]:
        grid = prox_by_grid(op.eval, gamma, [0.0, 2.0], [(-0.5, 2.5), (-0.5, 2.5)])
        np.testing.assert_allclose(grid, expected, atol=2e-3)
        np.testing.assert_allclose(op.prox(gamma, np.array([0.0, 2.0])), expected, atol=1e-15)


def test_tv_large_lambda_gives_mean(rng):
    v = rng.standard_normal(15)
    # flat solution once t dominates the partial sums of the centered signal
    t = np.max(np.abs(np.cumsum(v - v.mean())))
    np.testing.assert_allclose(tv1d_denoise(v, t), np.full(15, v.mean()), atol=1e-13)
    np.testing.assert_allclose(tv1d_denoise(v, 10 * t), np.full(15, v.mean()), atol=1e-13)


def test_tv_matches_dual_oracle(rng):
    for _ in range(400):
        n = int(rng.integers(1, 40))
        v = rng.standard_normal(n) * rng.choice([0.1, 1.0, 10.0])
        if rng.random() < 0.3:
            v = np.round(v)
        t = float(rng.choice([1e-3, 0.1, 0.5, 2.0, 50.0]))
        np.testing.assert_allclose(tv1d_denoise(v, t), tv1d_dual_oracle(v, t), atol=1e-9)


def test_tv2d_rows_and_cols_act_on_their_axis(rng):
    img = rng.standard_normal((3, 4))
    rows = prox_tv2d_rows((3, 4), 0.5).prox(1.0, img.ravel()).reshape(3, 4)
    cols = prox_tv2d_cols((3, 4), 0.5).prox(1.0, img.ravel()).reshape(3, 4)
    for i in range(3):
        np.testing.assert_allclose(rows[i], tv1d_dual_oracle(img[i], 0.5), atol=1e-9)
    for j in range(4):
        np.testing.assert_allclose(cols[:, j], tv1d_dual_oracle(img[:, j], 0.5), atol=1e-9)


def test_eval_accepts_stacks():
    pts = np.array([[0.0, 1.0], [2.0, -1.0]])
    np.testing.assert_allclose(prox_l1(1.0).eval(pts), [1.0, 3.0])
    np.testing.assert_allclose(prox_tv1d(2.0).eval(pts), [2.0, 6.0])
    np.testing.assert_array_equal(project_box(0, 1).eval(pts), [0.0, np.inf])


# --- properties ------------------------------------------------------------

@pytest.mark.parametrize("p", [1, 2, 5, 20])
def test_firm_nonexpansiveness(p, rng):
    for name, op in catalog(p).items():
        worst = np.inf
        for _ in range(250):
            gamma = float(rng.uniform(0.1, 3.0))
            v, w = rng.standard_normal(p) * 2, rng.standard_normal(p) * 2
            worst = min(worst, firm_nonexpansiveness_residual(lambda u: op.prox(gamma, u), v, w))
        assert worst >= -1e-10, name


@pytest.mark.parametrize("p", [1, 2, 3])
def test_prox_matches_grid_oracle(p, rng):
    half = {1: 2.0, 2: 0.5, 3: 0.1}[p]
    gamma = 0.8
    for name, op in catalog(p).items():
        if name.startswith("tv_"):
            continue
        v = rng.uniform(-1, 1, p)
        closed = op.prox(gamma, v)
        grid = prox_by_grid(op.eval, gamma, v, grid_box(closed, half, rng))
        np.testing.assert_allclose(grid, closed, atol=2e-3, err_msg=name)
        # an interior grid minimizer of a strongly convex objective is global
        assert np.all(np.abs(grid - closed) < half - 1e-3), name


@pytest.mark.parametrize("p", [1, 2, 5, 20])
def test_projections_idempotent(p, rng):
    for name, op in catalog(p).items():
        if not op.is_projection:
            continue
        for _ in range(50):
            once = op.prox(1.0, rng.standard_normal(p) * 3)
            np.testing.assert_allclose(op.prox(1.0, once), once, atol=1e-12, rtol=0, err_msg=name)
            assert op.eval(once) == 0.0


vectors = arrays(np.float64, st.integers(1, 12), elements=st.floats(-1e3, 1e3))


@settings(max_examples=200, deadline=None)
@given(vectors, st.floats(0.0, 10.0))
def test_simplex_output_feasible(v, _):
    u = simplex_projection(v)
    assert np.all(u >= 0)
    assert abs(u.sum() - 1.0) <= 1e-9


@settings(max_examples=200, deadline=None)
@given(vectors, st.floats(1e-3, 1e3))
def test_tv_preserves_mean_and_reduces_variation(v, t):
    u = tv1d_denoise(v, t)
    assert abs(u.mean() - v.mean()) <= 1e-9 * max(1.0, np.abs(v).max())
    assert np.abs(np.diff(u)).sum() <= np.abs(np.diff(v)).sum() * (1 + 1e-12) + 1e-9


def test_grid_minimize_rejects_high_dim():
    with pytest.raises(ValueError):
        grid_minimize(lambda u: 0.0, [(0, 1)] * 4)
