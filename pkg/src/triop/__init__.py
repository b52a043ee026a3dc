"""Three-operator splitting with gradient-mapping diagnostics."""

from .core import (
    ConfigurationError,
    InequalityViolation,
    InvalidReferenceError,
    IterateState,
    NumericalError,
    ProxOracle,
    SmoothOracle,
    SolverConfig,
    SplitProblem,
    TraceRecord,
    default_step_size,
    resolve_step_size,
)
from .solver import SolveResult, construct_fixed_point, gradient_mapping, solve, tos_step

__version__ = "0.1.0"
