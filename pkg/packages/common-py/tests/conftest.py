"""Pytest configuration and fixtures for common-py tests."""

import sys
from pathlib import Path

import pytest


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "slow: marks tests as slow (deselect with '-m \"not slow\"')"
    )


@pytest.fixture(scope="session", autouse=True)
def setup_test_path():
    """Put packages/common-py on sys.path for runs without an editable install."""
    package_root_str = str(Path(__file__).parent.parent)
    if package_root_str not in sys.path:
        sys.path.insert(0, package_root_str)
    yield


@pytest.fixture
def write_config(tmp_path):
    """Write key=value text to a solver config file and return its path."""

    def write(text: str, name: str = "solver.cfg") -> Path:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return write
