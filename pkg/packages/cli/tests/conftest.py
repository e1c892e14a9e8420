"""Pytest configuration and fixtures for CLI tests.

This conftest.py ensures tests work for both developers (editable install)
and users (pip installed package).
"""

import sys
from pathlib import Path

import pytest
from typer.testing import CliRunner


def pytest_configure(config):
    """Configure pytest with custom markers and path setup."""
    config.addinivalue_line(
        "markers", "slow: marks tests as slow (deselect with '-m \"not slow\"')"
    )
    config.addinivalue_line("markers", "integration: marks tests as integration tests")


@pytest.fixture(scope="session", autouse=True)
def setup_test_path():
    """Ensure the package root is in the Python path."""
    package_root = Path(__file__).parent.parent
    tests_root = Path(__file__).parent

    package_root_str = str(package_root)
    if package_root_str not in sys.path:
        sys.path.insert(0, package_root_str)

    tests_root_str = str(tests_root)
    if tests_root_str not in sys.path:
        sys.path.insert(0, tests_root_str)

    yield


@pytest.fixture
def runner():
    """Create CLI test runner."""
    return CliRunner()


@pytest.fixture
def completion_dir(tmp_path, runner):
    """A noiseless 8x24 rank-2 completion problem with 20% missing entries."""
    from bilinrank_cli.main import app

    out = tmp_path / "inst"
    result = runner.invoke(
        app,
        ["gen", "--out", str(out), "--rows", "8", "--cols", "24", "--rank", "2",
         "--missing", "0.2", "--seed", "1"],
    )
    assert result.exit_code == 0, result.output
    return out


@pytest.fixture
def sweep_config(tmp_path):
    """Small sweep experiment file, reproducible (no timing)."""
    path = tmp_path / "sweep.yaml"
    path.write_text(
        "kind: sweep\n"
        "master_seed: 11\n"
        "repetitions: 2\n"
        "record_timing: false\n"
        "instance: {rows: 8, cols: 24, rank: 2, k: 4, missing: 0.2}\n"
        "varpro: {max_iters: 50}\n"
        "mu_grid: [0.001, 1.0]\n",
        encoding="utf-8",
    )
    return path
