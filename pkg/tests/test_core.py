import numpy as np
import pytest

from triop.core import (
    ConfigurationError,
    SolverConfig,
    SplitProblem,
    default_step_size,
    resolve_step_size,
    step_size_quality,
)
from triop.prox import prox_zero
from triop.smooth import zero_smooth


def test_auto_step_size():
    assert resolve_step_size(SolverConfig(gamma="auto"), 3.0) == pytest.approx(4.0 / 9.0, rel=1e-15)


def test_explicit_step_size_passthrough():
    assert resolve_step_size(SolverConfig(gamma=0.1), 1.0) == 0.1


@pytest.mark.parametrize("gamma", [2.0, 2.5, 10.0])
def test_step_size_at_or_above_two_over_L_rejected(gamma):
    with pytest.raises(ConfigurationError, match="gamma < 2/L"):
        resolve_step_size(SolverConfig(gamma=gamma), 1.0)


def test_auto_with_zero_lipschitz_rejected():
    with pytest.raises(ConfigurationError):
        resolve_step_size(SolverConfig(gamma="auto"), 0.0)


def test_explicit_step_with_zero_lipschitz_allowed():
    assert resolve_step_size(SolverConfig(gamma=7.0), 0.0) == 7.0


@pytest.mark.parametrize("L", [0.3, 1.0, 4.0, 250.0])
def test_default_step_maximizes_quality_on_grid(L):
    grid = np.linspace(0, 2.0 / L, 1002)[1:-1]
    best = step_size_quality(default_step_size(L), L)
    assert np.all(step_size_quality(grid, L) <= best * (1 + 1e-15))


@pytest.mark.parametrize(
    "kwargs",
    [
        {"gamma": -1.0},
        {"gamma": "fast"},
        {"max_iter": 0},
        {"tol": -1.0},
        {"trace_every": 0},
    ],
)
def test_invalid_config(kwargs):
    with pytest.raises(ConfigurationError):
        SolverConfig(**kwargs)


def test_problem_dim_validated():
    with pytest.raises(ConfigurationError):
        SplitProblem(zero_smooth(1), prox_zero(), prox_zero(), dim=0)


def test_objective_sums_terms():
    prob = SplitProblem(zero_smooth(2), prox_zero(), prox_zero(), dim=2)
    assert prob.objective(np.array([1.0, 2.0])) == 0.0
