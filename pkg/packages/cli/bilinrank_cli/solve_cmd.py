"""Solve commands - Run the VarPro solver or an ADMM baseline on a problem."""

from pathlib import Path
from typing import Any, Dict, Optional

import typer
from bilinrank_common import HarnessDefaults, ValidationError, load_key_value_file
from bilinrank_core import FactorPair, admm_solve, certify, solve
from bilinrank_experiments import normalized_distance
from bilinrank_schema import (
    AdmmConfig,
    SolveReport,
    SolverConfig,
    configs_from_key_values,
    to_json_string,
)
from bilinrank_telemetry import observe_solve

from .problems import Problem, load_problem
from .utils import (
    handle_error,
    info,
    maybe_write_metrics,
    print_certificate,
    print_report,
    success,
)


def _config_fields(
    config: Optional[Path], overrides: Dict[str, Any], admm: bool
) -> Dict[str, Any]:
    """Merge a key=value config file with CLI flags; flags win."""
    values = load_key_value_file(config) if config is not None else {}
    solver_fields, admm_fields = configs_from_key_values(values, overrides)
    fields = admm_fields if admm else solver_fields
    if "penalty" not in fields:
        raise ValidationError("A penalty is required: pass --mu, --penalty or set penalty in --config")
    return fields


def _penalty_override(mu: Optional[float], penalty: Optional[str], kind: str) -> Optional[str]:
    if penalty is not None:
        return penalty
    if mu is not None:
        return f"{kind}:mu={mu!r}"
    return None


def _finish(
    report: SolveReport,
    problem: Problem,
    out: Optional[Path],
    metrics_out: Optional[Path],
):
    observe_solve(report.solver, report.termination, report.seconds, report.iterations)
    distance = None
    if problem.truth is not None and problem.truth.any():
        distance = normalized_distance(report.X, problem.truth)
    print_report(report, distance)
    if out is not None:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(to_json_string(report), encoding="utf-8")
        success(f"Report written to {out}")
    maybe_write_metrics(metrics_out)


def solve_command(
    problem_path: Path = typer.Argument(..., help="Problem directory or pose observations CSV"),
    mu: Optional[float] = typer.Option(None, "--mu", help="fmu weight (ignored with --penalty)"),
    penalty: Optional[str] = typer.Option(
        None, "--penalty", help='Penalty string, e.g. "scad:lambda=1,gamma=3.7"'
    ),
    k: Optional[int] = typer.Option(None, "--k", help="Number of factor columns"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed of the random initial factors"),
    max_iters: Optional[int] = typer.Option(None, "--max-iters", help="Iteration limit"),
    budget_seconds: Optional[float] = typer.Option(
        None, "--budget-seconds", help="Wall-clock limit"
    ),
    eta: float = typer.Option(0.5, "--eta", help="pOSE mixing weight (pose problems)"),
    config: Optional[Path] = typer.Option(None, "--config", "-c", help="key=value solver config"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Write the JSON report here"),
    run_certificate: bool = typer.Option(
        False, "--certify", help="Test the result for global optimality"
    ),
    delta: float = typer.Option(0.0, "--delta", help="Restricted-isometry constant in [0, 1)"),
    metrics_out: Optional[Path] = typer.Option(
        None, "--metrics-out", help="Write Prometheus metrics here"
    ),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Show stack traces on errors"),
):
    """
    Minimize R(X) + ||A(X) - b||^2 with the reweighted VarPro solver.

    Examples:
        bilinrank solve inst --mu 512 --k 8 --out report.json
        bilinrank solve scene --eta 0.5 --penalty "fmu:mu=0.01" --certify
        bilinrank solve inst --config solver.cfg --seed 3
    """
    try:
        fields = _config_fields(
            config,
            {
                "penalty": _penalty_override(mu, penalty, "fmu"),
                "k": k,
                "seed": seed,
                "max_iters": max_iters,
                "budget_seconds": budget_seconds,
            },
            admm=False,
        )
        fields.setdefault("k", HarnessDefaults.K)
        cfg = SolverConfig.model_validate(fields)
        problem = load_problem(problem_path, eta)
        info(f"Solving {problem.kind} problem {problem.op.shape[0]}x{problem.op.shape[1]} with {cfg.penalty}")

        report = solve(cfg, problem.op, problem.b)
        _finish(report, problem, out, metrics_out)

        if run_certificate:
            cert = certify(
                problem.op, problem.b, FactorPair(report.B, report.C), cfg.penalty, delta
            )
            print_certificate(cert)

    except typer.Exit:
        raise
    except Exception as e:
        handle_error(e, verbose)
        raise typer.Exit(1)


def admm_command(
    problem_path: Path = typer.Argument(..., help="Problem directory or pose observations CSV"),
    mu: Optional[float] = typer.Option(None, "--mu", help="fmu weight (ignored with --penalty)"),
    penalty: Optional[str] = typer.Option(
        None, "--penalty", help='fmu, nuclear or rank penalty, e.g. "nuclear:mu=22.6"'
    ),
    rho: Optional[float] = typer.Option(None, "--rho", help="Augmented-Lagrangian parameter"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed recorded in the report"),
    max_iters: Optional[int] = typer.Option(None, "--max-iters", help="Iteration limit"),
    budget_seconds: Optional[float] = typer.Option(
        None, "--budget-seconds", help="Wall-clock limit"
    ),
    eta: float = typer.Option(0.5, "--eta", help="pOSE mixing weight (pose problems)"),
    config: Optional[Path] = typer.Option(
        None, "--config", "-c", help="key=value config (admm_ keys)"
    ),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Write the JSON report here"),
    metrics_out: Optional[Path] = typer.Option(
        None, "--metrics-out", help="Write Prometheus metrics here"
    ),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Show stack traces on errors"),
):
    """
    Run the ADMM baseline on a problem.

    Examples:
        bilinrank admm inst --mu 512 --max-iters 2000
        bilinrank admm inst --penalty "nuclear:mu=22.6" --rho 10
    """
    try:
        fields = _config_fields(
            config,
            {
                "penalty": _penalty_override(mu, penalty, "fmu"),
                "rho": rho,
                "seed": seed,
                "max_iters": max_iters,
                "budget_seconds": budget_seconds,
            },
            admm=True,
        )
        cfg = AdmmConfig.model_validate(fields)
        problem = load_problem(problem_path, eta)
        info(f"ADMM on {problem.kind} problem with {cfg.penalty}, rho = {cfg.rho:g}")

        report = admm_solve(cfg, problem.op, problem.b)
        _finish(report, problem, out, metrics_out)

    except typer.Exit:
        raise
    except Exception as e:
        handle_error(e, verbose)
        raise typer.Exit(1)
