"""Info command - Version information."""

import sys

import bilinrank_common
import bilinrank_core
import bilinrank_experiments
import bilinrank_schema
import bilinrank_telemetry
import numpy
import typer
from rich.table import Table

from . import __version__
from .utils import console, error


def version():
    """
    Show bilinrank version information.

    Examples:
        bilinrank version
    """
    try:
        python_version = (
            f"{sys.version_info.major}.{sys.version_info.minor}.{sys.version_info.micro}"
        )

        table = Table(
            title="bilinrank Version Information", show_header=True, header_style="bold cyan"
        )
        table.add_column("Component", style="cyan", no_wrap=True)
        table.add_column("Version", style="green")

        table.add_row("CLI", __version__)
        table.add_row("core", bilinrank_core.__version__)
        table.add_row("schema", bilinrank_schema.__version__)
        table.add_row("experiments", bilinrank_experiments.__version__)
        table.add_row("telemetry", bilinrank_telemetry.__version__)
        table.add_row("common", bilinrank_common.__version__)
        table.add_row("numpy", numpy.__version__)
        table.add_row("Python", python_version)

        console.print(table)

    except Exception as e:
        error(f"Failed to get version info: {str(e)}")
        raise typer.Exit(1)
