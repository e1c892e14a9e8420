"""Replay command - Re-execute one run of a stored experiment and compare."""

from pathlib import Path
from typing import Dict, List

import typer
from bilinrank_common import ExitCodes, ValidationError
from bilinrank_experiments import (
    RUN_COLUMNS,
    format_value,
    load_experiment,
    read_csv,
    render_csv,
    replay,
    runs_path,
)

from .utils import error, handle_error, success

# Wall-clock columns differ between any two executions.
IGNORED_COLUMNS = frozenset({"seconds"})


def _stored_rows(rows: List[Dict[str, str]], results: Path, run: int):
    if rows and "run_index" not in rows[0]:
        raise ValidationError(
            f"{results} holds aggregated rows; replay against {runs_path(results)}"
        )
    return [row for row in rows if row.get("run_index") == str(run)]


def replay_command(
    results: Path = typer.Argument(..., help="Result CSV written by an experiment command"),
    config: Path = typer.Option(..., "--config", "-c", help="Experiment YAML that produced it"),
    run: int = typer.Option(..., "--run", help="Run index to re-execute"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Show stack traces on errors"),
):
    """
    Re-execute a single run and check it against the stored rows.

    The replayed rows are printed as CSV. Exits 1 when any value other than
    the timing column differs.

    Examples:
        bilinrank replay results/sweep.csv --config sweep.yaml --run 3
        bilinrank replay results/table1.runs.csv --config table1.yaml --run 0
    """
    try:
        kind, stored = read_csv(results)
        spec = load_experiment(config)
        if kind != spec.kind:
            raise ValidationError(f"{results} holds a '{kind}' experiment, {config} a '{spec.kind}'")

        columns = RUN_COLUMNS[kind]
        expected = _stored_rows(stored, results, run)
        replayed = replay(spec, run)
        typer.echo(render_csv(kind, columns, replayed), nl=False)

        compared = [c for c in columns if c not in IGNORED_COLUMNS]
        actual = [{c: format_value(row.get(c)) for c in compared} for row in replayed]
        expected = [{c: row.get(c, "") for c in compared} for row in expected]

        if actual != expected:
            error(f"Run {run} does not match {results}")
            for i, (a, e) in enumerate(zip(actual, expected)):
                for column in compared:
                    if a[column] != e[column]:
                        error(f"  row {i} {column}: stored {e[column]!r}, replayed {a[column]!r}")
            if len(actual) != len(expected):
                error(f"  stored {len(expected)} row(s), replayed {len(actual)}")
            raise typer.Exit(ExitCodes.FATAL)

        success(f"Run {run} reproduced ({len(actual)} row(s))")

    except typer.Exit:
        raise
    except Exception as e:
        handle_error(e, verbose)
        raise typer.Exit(ExitCodes.FATAL)
