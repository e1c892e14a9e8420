"""Pytest configuration and fixtures for telemetry tests."""

import sys
from pathlib import Path

import pytest


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "slow: marks tests as slow (deselect with '-m \"not slow\"')"
    )


@pytest.fixture(scope="session", autouse=True)
def setup_test_path():
    """Put packages/telemetry on sys.path for runs without an editable install."""
    package_root_str = str(Path(__file__).parent.parent)
    if package_root_str not in sys.path:
        sys.path.insert(0, package_root_str)
    yield


@pytest.fixture
def sample():
    """Current value of a metric sample in the bilinrank registry (0 when never observed)."""
    from bilinrank_telemetry import REGISTRY

    def read(name: str, **labels) -> float:
        return REGISTRY.get_sample_value(name, labels) or 0.0

    return read
