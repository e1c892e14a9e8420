"""Pytest configuration and fixtures for experiments tests.

This conftest.py ensures tests work for both developers (editable install)
and users (pip installed package).
"""

import sys
from pathlib import Path

import pytest


def pytest_configure(config):
    """Configure pytest with custom markers."""
    config.addinivalue_line(
        "markers", "slow: marks tests as slow (deselect with '-m \"not slow\"')"
    )


@pytest.fixture(scope="session", autouse=True)
def setup_test_path():
    """Ensure the package root is in the Python path."""
    package_root = str(Path(__file__).parent.parent)
    if package_root not in sys.path:
        sys.path.insert(0, package_root)
    yield


@pytest.fixture
def write_spec(tmp_path):
    """Write a YAML experiment file and return its path"""

    def write(text: str, name: str = "experiment.yaml") -> Path:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return write


@pytest.fixture
def small_sweep():
    """Noiseless 8x24 rank-2 sweep with a three-point weight grid"""
    from bilinrank_schema import ExperimentSpec

    return ExperimentSpec(
        kind="sweep",
        master_seed=11,
        repetitions=2,
        record_timing=False,
        instance={"rows": 8, "cols": 24, "rank": 2, "k": 4, "missing": 0.2},
        varpro={"max_iters": 100},
        mu_grid=[1e-3, 1.0, 1e6],
        solvers=["varpro"],
    )
