"""Pytest configuration and fixtures for core tests.

This conftest.py ensures tests work for both developers (editable install)
and users (pip installed package).
"""

import sys
from pathlib import Path

import numpy as np
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
def rng():
    """Seeded generator for randomized property checks"""
    return np.random.default_rng(20240611)


def low_rank(rng, m, n, r):
    return rng.standard_normal((m, r)) @ rng.standard_normal((n, r)).T


@pytest.fixture
def low_rank_matrix(rng):
    """Factory for random m x n matrices of rank r"""

    def make(m, n, r):
        return low_rank(rng, m, n, r)

    return make


@pytest.fixture
def small_completion(rng):
    """Noiseless 8x20 rank-2 completion problem with 25% of entries missing"""
    from bilinrank_core import MaskedOp

    M0 = low_rank(rng, 8, 20, 2)
    W = (rng.random((8, 20)) > 0.25).astype(int)
    W[:, :3] = 1
    W[:3, :] = 1
    op = MaskedOp(W)
    return {"M0": M0, "W": W, "op": op, "b": op.observe(M0)}


@pytest.fixture
def pose_scene(rng):
    """Small weak-perspective pOSE scene: 3 cameras, 10 points, eta = 0.5"""
    from bilinrank_core import PoseOp

    F, n = 3, 10
    points = np.hstack([rng.standard_normal((n, 3)), np.ones((n, 1))])
    cams = []
    for _ in range(F):
        Q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
        P = np.zeros((3, 4))
        P[:2, :3] = Q[:2]
        P[:2, 3] = rng.standard_normal(2)
        P[2, 3] = 1.0
        cams.append(P)
    X = np.vstack([P @ points.T for P in cams])
    ids = [(i, j) for i in range(F) for j in range(n)]
    cam_ids = np.array([i for i, _ in ids])
    pt_ids = np.array([j for _, j in ids])
    uv = np.array([X[3 * i : 3 * i + 2, j] / X[3 * i + 2, j] for i, j in ids])
    op = PoseOp(F, n, cam_ids, pt_ids, uv, 0.5)
    return {"op": op, "X": X, "F": F, "n": n}


@pytest.fixture
def nrsfm_cameras(rng):
    """Four orthographic 2x3 cameras"""
    cams = []
    for _ in range(4):
        Q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
        cams.append(Q[:2])
    return np.stack(cams)
