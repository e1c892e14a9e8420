"""Experiment commands - table1, sweep, bias, pose and nrsfm."""

import time
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import typer
from bilinrank_common import EnvVars, ExitCodes, ValidationError
from bilinrank_experiments import (
    ExperimentResult,
    load_experiment,
    override_dict,
    render_csv,
    run_experiment,
    write_result,
)
from bilinrank_schema import ExperimentSpec, experiment_from_dict

from .utils import (
    console,
    format_duration,
    handle_error,
    info,
    maybe_write_metrics,
    parse_float_list,
    print_rows_table,
    success,
    warning,
)


def build_spec(kind: str, config: Optional[Path], flags: Dict[str, Any]) -> ExperimentSpec:
    """
    Experiment spec from an optional YAML file plus CLI flags.

    Flags that were not given are None and leave the file (or the defaults)
    untouched. Grid-valued flags (--pattern, --missing, --noise, --eta) map
    to one-element grids for the experiments that iterate over them.
    """
    if config is not None:
        spec = load_experiment(config)
        if spec.kind != kind:
            raise ValidationError(
                f"{config} describes a '{spec.kind}' experiment; use 'bilinrank {spec.kind}'"
            )
        data = spec.model_dump()
    else:
        data = {"kind": kind}

    def grid(value):
        return None if value is None else [value]

    overrides: Dict[str, Any] = {
        "master_seed": flags.get("seed"),
        "repetitions": flags.get("reps"),
        "output": None if flags.get("out") is None else str(flags["out"]),
        "workers": flags.get("workers"),
        "budget_seconds": flags.get("budget_seconds"),
        "mu": flags.get("mu"),
        "mu_grid": parse_float_list(flags.get("mu_grid")),
        "solvers": flags.get("solvers") or None,
        "record_timing": False if flags.get("no_timing") else None,
    }
    if kind == "table1":
        overrides.update(
            {
                "instance.k": flags.get("k"),
                "table1.patterns": grid(flags.get("pattern")),
                "table1.missing_levels": grid(flags.get("missing")),
                "table1.noise_levels": grid(flags.get("noise")),
            }
        )
    elif kind == "sweep":
        overrides.update(
            {
                "instance.k": flags.get("k"),
                "instance.pattern": flags.get("pattern"),
                "instance.missing": flags.get("missing"),
                "instance.noise": flags.get("noise"),
            }
        )
    elif kind == "pose":
        overrides.update(
            {
                "pose.k": flags.get("k"),
                "pose.etas": grid(flags.get("eta")),
                "pose.missing": flags.get("missing"),
            }
        )
    elif kind == "nrsfm":
        overrides["nrsfm.k"] = flags.get("k")
    return experiment_from_dict(override_dict(data, overrides))


def report_result(result: ExperimentResult, spec: ExperimentSpec) -> None:
    """Write (or print) the result table and summarize it."""
    if spec.output:
        for path in write_result(result, Path(spec.output)):
            success(f"Wrote {path}")
    else:
        typer.echo(render_csv(result.kind, result.columns, result.rows), nl=False)

    if result.kind == "table1":
        print_rows_table(
            "Distance to ground truth",
            result.rows,
            ["pattern", "noise", "missing", "solver", "mean_dist", "std_dist", "mean_iters"],
        )
    for message in result.warnings:
        warning(message)
    if result.failures:
        warning(f"{result.failures} run(s) failed; see the error column")


def run_kind(kind: str, config: Optional[Path], flags: Dict[str, Any]) -> None:
    verbose = flags.get("verbose", False)
    try:
        spec = build_spec(kind, config, flags)
        info(f"Running {kind} (master seed {spec.master_seed}, {spec.repetitions} repetition(s))")
        start = time.perf_counter()
        result = run_experiment(spec)
        console.print(f"[dim]finished in {format_duration(time.perf_counter() - start)}[/dim]")
        report_result(result, spec)
        maybe_write_metrics(flags.get("metrics_out"))
    except typer.Exit:
        raise
    except Exception as e:
        handle_error(e, verbose)
        raise typer.Exit(ExitCodes.FATAL)

    if result.failures:
        raise typer.Exit(ExitCodes.RUN_FAILURES)


def _make_command(kind: str, doc: str) -> Callable[..., None]:
    def command(
        config: Optional[Path] = typer.Option(None, "--config", "-c", help="Experiment YAML file"),
        out: Optional[Path] = typer.Option(
            None, "--out", "-o", help="Result CSV (default: stdout)"
        ),
        seed: Optional[int] = typer.Option(None, "--seed", help="Master seed"),
        reps: Optional[int] = typer.Option(None, "--reps", help="Repetitions"),
        mu: Optional[float] = typer.Option(None, "--mu", help="Weight override (table1)"),
        mu_grid: Optional[str] = typer.Option(
            None, "--mu-grid", help='Comma-separated weights, e.g. "0.1,1,10"'
        ),
        k: Optional[int] = typer.Option(None, "--k", help="Number of factor columns"),
        pattern: Optional[str] = typer.Option(None, "--pattern", help="uniform or tracking"),
        missing: Optional[float] = typer.Option(None, "--missing", help="Missing fraction"),
        noise: Optional[float] = typer.Option(None, "--noise", help="Noise standard deviation"),
        eta: Optional[float] = typer.Option(None, "--eta", help="pOSE mixing weight"),
        solvers: Optional[List[str]] = typer.Option(
            None, "--solver", help="Solver to run (repeatable): varpro, admm_fmu, ..."
        ),
        budget_seconds: Optional[float] = typer.Option(
            None, "--budget-seconds", help="Wall-clock limit per solve"
        ),
        workers: Optional[int] = typer.Option(
            None, "--workers", envvar=EnvVars.WORKERS, help="Parallel worker processes"
        ),
        no_timing: bool = typer.Option(
            False, "--no-timing", help="Write timing columns as 0 (reproducible files)"
        ),
        metrics_out: Optional[Path] = typer.Option(
            None, "--metrics-out", help="Write Prometheus metrics here"
        ),
        verbose: bool = typer.Option(False, "--verbose", "-v", help="Show stack traces on errors"),
    ):
        run_kind(kind, config, dict(locals()))

    command.__doc__ = doc
    command.__name__ = kind
    return command


table1 = _make_command(
    "table1",
    """
    Distance to ground truth over missing-data levels (mean over repetitions).

    Examples:
        bilinrank table1 --reps 20 --out results/table1.csv
        bilinrank table1 --pattern tracking --missing 0.5 --solver varpro --solver admm_fmu
    """,
)

sweep = _make_command(
    "sweep",
    """
    Rank versus datafit over a grid of weights.

    Examples:
        bilinrank sweep --mu-grid "0.1,1,10,100,1000" --missing 0.3
        bilinrank sweep --config sweep.yaml --out results/sweep.csv
    """,
)

bias = _make_command(
    "bias",
    """
    Singular values after the prox of each regularizer.

    Examples:
        bilinrank bias --seed 3 --out results/bias.csv
    """,
)

pose = _make_command(
    "pose",
    """
    Rank versus datafit on synthetic pOSE scenes.

    Examples:
        bilinrank pose --mu-grid "0.001,0.01,0.1,1" --eta 0.5
    """,
)

nrsfm = _make_command(
    "nrsfm",
    """
    Rank versus datafit on synthetic non-rigid scenes.

    Examples:
        bilinrank nrsfm --mu-grid "0.01,0.1,1,10" --reps 5
    """,
)
