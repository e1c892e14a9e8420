"""Pytest configuration and fixtures for schema tests.

This conftest.py ensures tests work for both developers (editable install)
and users (pip installed package).
"""

import sys
from pathlib import Path

import pytest


def pytest_configure(config):
    """Configure pytest with custom markers and path setup."""
    config.addinivalue_line(
        "markers", "slow: marks tests as slow (deselect with '-m \"not slow\"')"
    )
    config.addinivalue_line("markers", "requires_yaml: marks tests that require pyyaml")


@pytest.fixture(scope="session", autouse=True)
def setup_test_path():
    """Ensure the package root is in the Python path.

    This makes the package importable whether tests are run from:
    - The package directory (packages/schema)
    - The project root
    - Or after pip install
    """
    package_root = Path(__file__).parent.parent

    package_root_str = str(package_root)
    if package_root_str not in sys.path:
        sys.path.insert(0, package_root_str)

    yield


def pytest_collection_modifyitems(config, items):
    """Modify test collection to handle optional dependencies."""
    try:
        import yaml  # noqa: F401

        has_yaml = True
    except ImportError:
        has_yaml = False

    for item in items:
        # Skip tests marked as requires_yaml if yaml is not installed
        if "requires_yaml" in item.keywords and not has_yaml:
            item.add_marker(pytest.mark.skip(reason="pyyaml not installed"))


@pytest.fixture
def minimal_experiment():
    """Smallest valid experiment spec"""
    return {"kind": "table1"}


@pytest.fixture
def sweep_experiment():
    """Sweep spec with every section filled in"""
    return {
        "version": "1",
        "kind": "sweep",
        "master_seed": 7,
        "repetitions": 2,
        "output": "out.csv",
        "workers": 2,
        "record_timing": False,
        "solvers": ["varpro", "admm_fmu"],
        "mu_grid": [1.0, 10.0, 100.0],
        "instance": {"rows": 12, "cols": 40, "rank": 2, "k": 4, "missing": 0.2},
        "varpro": {"max_iters": 50},
        "admm": {"rho": 2.0, "match_varpro_time": False},
    }


@pytest.fixture
def sample_report_data():
    """Plain-data SolveReport"""
    return {
        "solver": "varpro",
        "penalty": {"kind": "fmu", "mu": 4.0},
        "X": [[1.0, 2.0], [3.0, 4.0]],
        "B": [[1.0], [2.0]],
        "C": [[1.0], [2.0]],
        "trace": [
            {"iteration": 1, "objective": 5.0, "damping": 0.01, "accepted": True},
            {"iteration": 2, "objective": 6.0, "damping": 0.001, "accepted": False},
            {"iteration": 3, "objective": 4.5, "damping": 0.01, "accepted": True},
        ],
        "termination": "max_iters",
        "iterations": 3,
        "initial_objective": 9.0,
        "final_objective": 4.5,
        "seed": 3,
    }
