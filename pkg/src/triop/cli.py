"""Experiment runner.

Usage::

    triop run experiment.yaml --out results/ [--check] [--max-iter N] [--tol X]

Exit status: 0 on success, 1 on configuration or numerical errors, 2 when a
certified inequality is violated.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import re
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import yaml

from . import diagnostics, problems
from .core import (
    ConfigurationError,
    InequalityViolation,
    InvalidReferenceError,
    NumericalError,
    SolverConfig,
    TraceRecord,
    resolve_step_size,
)
from .oracle import OracleError
from .solver import SolveResult, solve

logger = logging.getLogger("triop")

SEED_ENV = "TRIOP_SEED_OVERRIDE"
TRACE_COLUMNS = ("iter", "gmap_norm", "objective", "infeas", "dist_to_ref", "gamma")
REPORT_COLUMNS = ("name", "location", "residual", "passed")
SWEEP_COLUMNS = ("gamma_mult", "gamma", "iters_to_tol", "final_gmap_norm")

EXIT_OK, EXIT_ERROR, EXIT_VIOLATION = 0, 1, 2

_MULT_RE = re.compile(r"^\s*([0-9.eE+-]+)\s*/\s*L\s*$")


@dataclass
class ExperimentSpec:
    problem: Dict[str, Any]
    gamma: Union[float, str] = "auto"
    max_iter: int = 1000
    tol: float = 1e-8
    trace_every: int = 1
    check: bool = False
    gamma_sweep: Optional[List[float]] = None

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentSpec":
        if not isinstance(data, dict):
            raise ConfigurationError("experiment spec must be a mapping")
        known = {"problem", "gamma", "max_iter", "tol", "trace_every", "check", "gamma_sweep"}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"unknown spec keys: {sorted(unknown)}")
        if "problem" not in data or not isinstance(data["problem"], dict):
            raise ConfigurationError("spec needs a 'problem' mapping")
        problem = dict(data["problem"])
        family = problem.get("family")
        if family not in problems.FAMILIES:
            raise ConfigurationError(
                f"unknown problem family {family!r}; expected one of {sorted(problems.FAMILIES)}"
            )
        _, fields = problems.FAMILIES[family]
        missing = [k for k in fields if k not in problem]
        extra = set(problem) - set(fields) - {"family"}
        if missing:
            raise ConfigurationError(f"problem '{family}' is missing fields {missing}")
        if extra:
            raise ConfigurationError(f"problem '{family}' has unknown fields {sorted(extra)}")
        spec = cls(problem=problem, **{k: v for k, v in data.items() if k != "problem"})
        parse_gamma(spec.gamma)
        if spec.gamma_sweep is not None:
            spec.gamma_sweep = [float(m) for m in spec.gamma_sweep]
        return spec


def load_spec(path) -> ExperimentSpec:
    with open(path) as fh:
        data = yaml.safe_load(fh)
    return ExperimentSpec.from_dict(data)


def parse_gamma(value) -> Tuple[str, float]:
    """Return ('auto', 0), ('abs', gamma) or ('mult', c) for gamma = c/L."""
    if value == "auto":
        return "auto", 0.0
    if isinstance(value, str):
        m = _MULT_RE.match(value)
        if not m:
            raise ConfigurationError(f"gamma must be a number, 'auto' or '<c>/L', got {value!r}")
        return "mult", float(m.group(1))
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigurationError(f"gamma must be a number, 'auto' or '<c>/L', got {value!r}")
    return "abs", float(value)


def resolve_gamma(value, L: float) -> Union[float, str]:
    kind, num = parse_gamma(value)
    if kind == "auto":
        return "auto"
    if kind == "mult":
        if not L > 0:
            raise ConfigurationError("gamma given as a multiple of 1/L but L = 0")
        return num / L
    return num


def make_problem(spec: ExperimentSpec) -> problems.Instance:
    params = dict(spec.problem)
    family = params.pop("family")
    override = os.environ.get(SEED_ENV)
    if override is not None:
        for key in ("seed", "noise_seed"):
            if key in params:
                params[key] = int(override)
    build, fields = problems.FAMILIES[family]
    return build(*(params[k] for k in fields))


def _fmt(value) -> str:
    if value is None:
        return ""
    return format(float(value), ".17g")


def write_trace(path, trace: List[TraceRecord], gamma: float):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        for r in trace:
            w.writerow([r.iter, _fmt(r.gmap_norm), _fmt(r.objective), _fmt(r.infeas),
                        _fmt(r.dist_to_ref), _fmt(gamma)])


def write_reports(path, reports):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(REPORT_COLUMNS)
        for r in reports:
            w.writerow([r.name, "" if r.location is None else r.location, _fmt(r.residual),
                        "true" if r.passed else "false"])


def _run_one(instance, spec: ExperimentSpec, gamma_value, out: Path) -> Tuple[SolveResult, int]:
    problem = instance.problem
    config = SolverConfig(
        gamma=resolve_gamma(gamma_value, problem.f.lipschitz),
        max_iter=spec.max_iter,
        tol=spec.tol,
        trace_every=spec.trace_every,
        check_inequalities=spec.check,
    )
    gamma = resolve_step_size(config, problem.f.lipschitz)
    y_ref = None
    if instance.reference is not None:
        y_ref = instance.reference.y_star(gamma)
        try:
            diagnostics.validate_reference(problem, gamma, y_ref)
        except InvalidReferenceError as exc:
            logger.warning("dropping reference: %s", exc)
            y_ref = None
    elif instance.note:
        logger.info("%s", instance.note)

    out.mkdir(parents=True, exist_ok=True)
    status = EXIT_OK
    try:
        result = solve(problem, config, y0=instance.y0, y_ref=y_ref)
    except InequalityViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        result = exc.partial
        status = EXIT_VIOLATION
    write_trace(out / "trace.csv", result.trace, result.gamma_used)
    if spec.check:
        write_reports(out / "reports.csv", result.reports)
    return result, status


def run(spec_path, out_dir, check=None, max_iter=None, tol=None) -> int:
    try:
        spec = load_spec(spec_path)
        if check is not None:
            spec.check = check
        if max_iter is not None:
            spec.max_iter = max_iter
        if tol is not None:
            spec.tol = tol
        out = Path(out_dir)
        start = time.perf_counter()
        instance = make_problem(spec)
        L = instance.problem.f.lipschitz

        if not spec.gamma_sweep:
            result, status = _run_one(instance, spec, spec.gamma, out)
            print(
                f"iters={result.iters} final_gmap_norm={result.trace[-1].gmap_norm:.6e} "
                f"converged={result.converged} wall_time={time.perf_counter() - start:.3f}s"
            )
            return status

        if not L > 0:
            raise ConfigurationError("gamma_sweep needs a smooth term with L > 0")
        for mult in spec.gamma_sweep:
            if not 0 < mult < 2.0:
                raise ConfigurationError(f"gamma must satisfy gamma < 2/L (sweep multiplier {mult:g})")
        rows = []
        status = EXIT_OK
        for mult in spec.gamma_sweep:
            result, st = _run_one(instance, spec, mult / L, out / f"gamma_{mult:g}")
            status = max(status, st)
            rows.append([repr(mult), _fmt(result.gamma_used),
                         result.iters if result.converged else "",
                         _fmt(result.trace[-1].gmap_norm)])
            print(f"gamma={mult:g}/L iters={result.iters} final_gmap_norm={result.trace[-1].gmap_norm:.6e} "
                  f"converged={result.converged}")
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "sweep_summary.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(SWEEP_COLUMNS)
            w.writerows(rows)
        print(f"sweep of {len(rows)} step sizes done, wall_time={time.perf_counter() - start:.3f}s")
        return status
    except (ConfigurationError, NumericalError, InvalidReferenceError, OracleError,
            yaml.YAMLError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="triop", description="Three-operator splitting experiments")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run an experiment spec")
    p_run.add_argument("spec", help="experiment spec (YAML)")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--check", action="store_true", default=None,
                       help="certify the convergence inequalities inline")
    p_run.add_argument("--max-iter", type=int, default=None)
    p_run.add_argument("--tol", type=float, default=None)
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return run(args.spec, args.out, check=args.check, max_iter=args.max_iter, tol=args.tol)


if __name__ == "__main__":
    sys.exit(main())
