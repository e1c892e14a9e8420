"""
Process-local Prometheus metrics for solver runs.

The metrics live in a dedicated registry, so nothing leaks into the default
prometheus_client registry of a host process. The CLI renders the registry in
text exposition format with --metrics-out.
"""

from pathlib import Path

from prometheus_client import CollectorRegistry, Counter, Histogram, generate_latest

REGISTRY = CollectorRegistry()

SOLVE_COUNT = Counter(
    "bilinrank_solves_total",
    "Completed solves",
    ["solver", "termination"],
    registry=REGISTRY,
)
SOLVE_SECONDS = Histogram(
    "bilinrank_solve_seconds",
    "Solve wall time in seconds",
    ["solver"],
    buckets=(0.01, 0.05, 0.1, 0.5, 1.0, 5.0, 10.0, 30.0, 60.0, 300.0),
    registry=REGISTRY,
)
SOLVE_ITERATIONS = Histogram(
    "bilinrank_solve_iterations",
    "Outer iterations per solve",
    ["solver"],
    buckets=(1, 5, 10, 25, 50, 100, 250, 500, 1000, 5000),
    registry=REGISTRY,
)
FAILURE_COUNT = Counter(
    "bilinrank_run_failures_total",
    "Runs that ended in an error",
    ["experiment", "code"],
    registry=REGISTRY,
)


def observe_solve(solver: str, termination: str, seconds: float, iterations: int) -> None:
    SOLVE_COUNT.labels(solver, termination).inc()
    SOLVE_SECONDS.labels(solver).observe(seconds)
    SOLVE_ITERATIONS.labels(solver).observe(iterations)


def observe_failure(experiment: str, code: str) -> None:
    FAILURE_COUNT.labels(experiment, code).inc()


def render_metrics() -> str:
    """Text exposition of every bilinrank metric."""
    return generate_latest(REGISTRY).decode("utf-8")


def write_metrics(path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_metrics(), encoding="utf-8")
    return path
