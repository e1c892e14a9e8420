"""
bilinrank Telemetry Package

Prometheus counters and histograms for solver runs.

Usage:
    from bilinrank_telemetry import observe_solve, render_metrics

    observe_solve("varpro", report.termination, report.seconds, report.iterations)
    print(render_metrics())
"""

from .prometheus_utils import (
    REGISTRY,
    observe_failure,
    observe_solve,
    render_metrics,
    write_metrics,
)

__version__ = "0.1.0"

__all__ = [
    "REGISTRY",
    "observe_solve",
    "observe_failure",
    "render_metrics",
    "write_metrics",
]
