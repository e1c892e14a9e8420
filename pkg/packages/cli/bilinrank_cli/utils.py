"""Utility functions and helpers for CLI commands."""

import traceback
from pathlib import Path
from typing import Any, Dict, List, Optional

from bilinrank_common import BilinrankError, ValidationError
from bilinrank_schema import CertificateReport, SolveReport, report_summary
from bilinrank_telemetry import write_metrics
from rich.console import Console
from rich.table import Table

# Status output goes to stderr; stdout carries CSV when no --out is given
console = Console(stderr=True)


def success(message: str):
    """Print a success message with green checkmark."""
    console.print(f"[bold green]✅ {message}[/bold green]")


def error(message: str):
    """Print an error message with red X."""
    console.print(f"[bold red]❌ {message}[/bold red]")


def warning(message: str):
    """Print a warning message with yellow icon."""
    console.print(f"[bold yellow]⚠️  {message}[/bold yellow]")


def info(message: str):
    """Print an info message with blue icon."""
    console.print(f"[bold blue]ℹ️  {message}[/bold blue]")


def handle_error(e: Exception, verbose: bool = False):
    """
    Centralized error handling with helpful messages.

    Args:
        e: The exception to handle
        verbose: If True, show full stack trace
    """
    if isinstance(e, ValidationError):
        error(f"Validation Error: {str(e)}")
        console.print("\n[dim]💡 Tip: Check the flags and the config file named in the message[/dim]")
    elif isinstance(e, BilinrankError):
        error(f"bilinrank Error [{e.code}]: {e.message}")
    elif isinstance(e, FileNotFoundError):
        error(f"File not found: {str(e)}")
        console.print("\n[dim]💡 Tip: Check that the file path is correct[/dim]")
    elif isinstance(e, KeyboardInterrupt):
        info("\nOperation cancelled by user")
    else:
        error(f"Unexpected error: {str(e)}")

    if verbose:
        console.print("\n[bold red]Stack Trace:[/bold red]")
        console.print(traceback.format_exc())


def parse_float_list(text: Optional[str]) -> Optional[List[float]]:
    """
    Parse a comma-separated list of floats ("0.1,1,10").

    Raises:
        ValidationError: If an entry is not a number
    """
    if text is None:
        return None
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError as e:
        raise ValidationError(f"Expected a comma-separated list of numbers, got '{text}'") from e


def print_report(report: SolveReport, distance: Optional[float] = None):
    """Print a solve report summary in a formatted table."""
    table = Table(title="Solve Report", show_header=True, header_style="bold cyan")
    table.add_column("Property", style="cyan", no_wrap=True)
    table.add_column("Value", style="white")

    for key, value in report_summary(report).items():
        table.add_row(key, _fmt(value))
    if distance is not None:
        table.add_row("distance_to_truth", _fmt(distance))

    console.print(table)


def print_certificate(report: CertificateReport):
    """Print a certificate verdict with its violated conditions and notes."""
    if report.certified:
        success(f"Certified globally optimal (rank {report.rank} < k = {report.k})")
    else:
        warning(f"Not certified (rank {report.rank}, k = {report.k})")
        for reason in report.reasons:
            console.print(f"  • {reason}")
    lo, hi = report.interval
    console.print(f"  [dim]forbidden interval: [{lo:.6g}, {hi:.6g}], mu = {report.mu:.6g}[/dim]")
    for note in report.notes:
        console.print(f"  [dim]note: {note}[/dim]")


def print_rows_table(title: str, rows: List[Dict[str, Any]], columns: List[str]):
    """Print result rows (e.g. the table1 summary) as a rich table."""
    table = Table(title=title, show_header=True, header_style="bold cyan")
    for column in columns:
        table.add_column(column, no_wrap=True)
    for row in rows:
        table.add_row(*(_fmt(row.get(column)) for column in columns))
    console.print(table)


def maybe_write_metrics(path: Optional[Path]):
    if path is not None:
        write_metrics(path)
        info(f"Metrics written to {path}")


def _fmt(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def format_duration(seconds: float) -> str:
    """Format duration in human-readable format."""
    if seconds < 1:
        return f"{seconds * 1000:.0f}ms"
    elif seconds < 60:
        return f"{seconds:.1f}s"
    else:
        minutes = int(seconds // 60)
        secs = int(seconds % 60)
        return f"{minutes}m {secs}s"
