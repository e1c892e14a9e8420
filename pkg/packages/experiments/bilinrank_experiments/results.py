"""
Experiment result tables and their CSV form.

Files start with a version comment naming the experiment, then a header row:

    # bilinrank-csv v1 experiment=sweep
    run_index,seed,solver,mu,final_rank,...

Floats are written with 17 significant digits, booleans as true/false and
missing values as empty fields.
"""

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, TextIO, Tuple

from bilinrank_common import CsvFormat, ValidationError, VersionInfo

Row = Dict[str, Any]

# =============================================================================
# COLUMN SETS
# =============================================================================

SOLVE_COLUMNS: Tuple[str, ...] = ("iterations", "seconds", "termination", "error")

TABLE1_RUN_COLUMNS: Tuple[str, ...] = (
    "run_index",
    "seed",
    "pattern",
    "noise",
    "missing",
    "missing_realized",
    "solver",
    "mu",
    "dist",
) + SOLVE_COLUMNS

TABLE1_COLUMNS: Tuple[str, ...] = (
    "pattern",
    "noise",
    "missing",
    "solver",
    "runs",
    "failures",
    "mean_dist",
    "std_dist",
    "mean_iters",
    "mean_seconds",
)

SWEEP_COLUMNS: Tuple[str, ...] = (
    "run_index",
    "seed",
    "solver",
    "mu",
    "final_rank",
    "datafit",
    "objective",
    "certified",
    "dist",
) + SOLVE_COLUMNS

POSE_COLUMNS: Tuple[str, ...] = (
    "run_index",
    "seed",
    "eta",
    "solver",
    "mu",
    "final_rank",
    "datafit",
    "objective",
    "certified",
    "ose_rms",
    "affine_rms",
) + SOLVE_COLUMNS

NRSFM_COLUMNS: Tuple[str, ...] = (
    "run_index",
    "seed",
    "solver",
    "mu",
    "final_rank",
    "datafit",
    "objective",
    "certified",
    "shape_dist",
) + SOLVE_COLUMNS

BIAS_COLUMNS: Tuple[str, ...] = (
    "run_index",
    "seed",
    "regularizer",
    "weight",
    "index",
    "sigma_x0",
    "sigma_prox",
)

# Columns of the per-run rows of each experiment kind
RUN_COLUMNS: Dict[str, Tuple[str, ...]] = {
    "table1": TABLE1_RUN_COLUMNS,
    "sweep": SWEEP_COLUMNS,
    "pose": POSE_COLUMNS,
    "nrsfm": NRSFM_COLUMNS,
    "bias": BIAS_COLUMNS,
}


@dataclass
class ExperimentResult:
    """
    Rows of one experiment plus bookkeeping.

    Attributes:
        kind: Experiment kind (table1, sweep, bias, pose, nrsfm)
        columns: Column order of `rows`
        rows: Result rows, ordered by run index
        failures: Number of rows whose run raised
        warnings: Soft-check messages (e.g. sweep monotonicity violations)
        runs: Per-run rows behind an aggregated table (table1 only)
        run_columns: Column order of `runs`
    """

    kind: str
    columns: Tuple[str, ...]
    rows: List[Row] = field(default_factory=list)
    failures: int = 0
    warnings: List[str] = field(default_factory=list)
    runs: List[Row] = field(default_factory=list)
    run_columns: Tuple[str, ...] = ()


# =============================================================================
# CSV
# =============================================================================


def format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return CsvFormat.FLOAT_FMT % value
    return str(value)


def header_line(kind: str) -> str:
    return f"{CsvFormat.HEADER_PREFIX} {VersionInfo.CSV_SCHEMA} experiment={kind}"


def write_rows(stream: TextIO, kind: str, columns: Sequence[str], rows: Iterable[Row]) -> None:
    """Write a versioned CSV table to an open text stream."""
    stream.write(header_line(kind) + "\n")
    writer = csv.DictWriter(
        stream, fieldnames=list(columns), delimiter=CsvFormat.DELIMITER, lineterminator="\n"
    )
    writer.writeheader()
    for row in rows:
        writer.writerow({name: format_value(row.get(name)) for name in columns})


def write_csv(path: Path, kind: str, columns: Sequence[str], rows: Iterable[Row]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as f:
        write_rows(f, kind, columns, rows)
    return path


def runs_path(path: Path) -> Path:
    """Companion file holding the per-run rows of an aggregated table."""
    return path.with_name(f"{path.stem}.runs{path.suffix or '.csv'}")


def write_result(result: ExperimentResult, path: Path) -> List[Path]:
    """
    Write the result table and, for aggregated tables, the per-run rows.

    Returns:
        Paths written
    """
    written = [write_csv(path, result.kind, result.columns, result.rows)]
    if result.runs:
        written.append(write_csv(runs_path(path), result.kind, result.run_columns, result.runs))
    return written


def render_csv(kind: str, columns: Sequence[str], rows: Iterable[Row]) -> str:
    buffer = io.StringIO()
    write_rows(buffer, kind, columns, rows)
    return buffer.getvalue()


def read_csv(path: Path) -> Tuple[str, List[Dict[str, str]]]:
    """
    Read a file written by write_csv.

    Returns:
        (experiment kind, rows as string dictionaries)

    Raises:
        ValidationError: If the file is missing or lacks the version line
    """
    if not path.exists():
        raise ValidationError(f"Result file not found: {path}")
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith(CsvFormat.HEADER_PREFIX):
        raise ValidationError(f"{path} is not a bilinrank result file (missing version line)")
    parts = dict(token.split("=", 1) for token in lines[0].split() if "=" in token)
    version = lines[0][len(CsvFormat.HEADER_PREFIX) :].split()[0]
    if version != VersionInfo.CSV_SCHEMA:
        raise ValidationError(
            f"Unsupported result file version '{version}' in {path}; expected {VersionInfo.CSV_SCHEMA}"
        )
    reader = csv.DictReader(lines[1:], delimiter=CsvFormat.DELIMITER)
    return parts.get("experiment", ""), list(reader)


# =============================================================================
# SELECTION AND AGGREGATION
# =============================================================================


def best_at_rank(rows: Iterable[Row], rank: int) -> Optional[Row]:
    """Row with the smallest datafit among successful rows of the given final rank."""
    candidates = [
        row
        for row in rows
        if not row.get("error") and row.get("final_rank") == rank and row.get("datafit") is not None
    ]
    if not candidates:
        return None
    return min(candidates, key=lambda row: row["datafit"])


def mean_std(values: Sequence[float]) -> Tuple[Optional[float], Optional[float]]:
    """Mean and population standard deviation; (None, None) for no values."""
    if not values:
        return None, None
    mean = math.fsum(values) / len(values)
    var = math.fsum((v - mean) ** 2 for v in values) / len(values)
    return mean, math.sqrt(var)
