"""Certify command - Test a stored solution for global optimality."""

from pathlib import Path
from typing import Optional

import typer
from bilinrank_common import HarnessDefaults, ValidationError
from bilinrank_core import FactorPair, balanced_factorize, certify
from bilinrank_schema import parse_penalty, report_from_json, to_json_string

from .problems import load_problem
from .utils import handle_error, print_certificate, success


def certify_command(
    problem_path: Path = typer.Argument(..., help="Problem directory or pose observations CSV"),
    report_path: Path = typer.Option(..., "--report", "-r", help="JSON report from solve or admm"),
    mu: Optional[float] = typer.Option(None, "--mu", help="fmu weight (default: the report's)"),
    penalty: Optional[str] = typer.Option(None, "--penalty", help="Penalty to certify against"),
    k: int = typer.Option(
        HarnessDefaults.K, "--k", help="Factor columns for reports without factors (ADMM)"
    ),
    delta: float = typer.Option(0.0, "--delta", help="Restricted-isometry constant in [0, 1)"),
    eta: float = typer.Option(0.5, "--eta", help="pOSE mixing weight (pose problems)"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Write the certificate JSON here"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Show stack traces on errors"),
):
    """
    Check the optimality certificate of a solution.

    A solution of rank below k is certified when no singular value of
    Z = X - A*A(X) + A*b lies in the forbidden interval around sqrt(mu).

    Examples:
        bilinrank certify inst --report report.json
        bilinrank certify inst --report admm.json --k 8 --delta 0.1
    """
    try:
        if not report_path.exists():
            raise ValidationError(f"Report not found: {report_path}")
        report = report_from_json(report_path.read_text(encoding="utf-8"))
        if penalty is not None:
            p = parse_penalty(penalty)
        elif mu is not None:
            p = parse_penalty(f"fmu:mu={mu!r}")
        else:
            p = report.penalty

        problem = load_problem(problem_path, eta)
        if report.B is not None and report.C is not None:
            F = FactorPair(report.B, report.C)
        else:
            F = balanced_factorize(report.X, k)

        cert = certify(problem.op, problem.b, F, p, delta)
        print_certificate(cert)

        if out is not None:
            out.parent.mkdir(parents=True, exist_ok=True)
            out.write_text(to_json_string(cert), encoding="utf-8")
            success(f"Certificate written to {out}")

    except typer.Exit:
        raise
    except Exception as e:
        handle_error(e, verbose)
        raise typer.Exit(1)
