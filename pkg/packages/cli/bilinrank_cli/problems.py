"""
Problem files read and written by gen, solve, admm and certify.

A problem is a directory in one of three layouts:

    completion   M0.csv, M.csv, W.csv, meta.json   (bilinrank_experiments.save_instance)
    pose         observations.csv [, X.csv]         cam_id,point_id,u,v
    nrsfm        cameras.csv, measurements.csv [, X_sharp.csv]

A bare observations CSV is accepted as a pose problem as well.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
from bilinrank_common import ValidationError, load_matrix_csv, save_matrix_csv
from bilinrank_core import (
    MeasurementOp,
    NrsfmOp,
    PoseOp,
    load_nrsfm_cameras_csv,
    load_pose_observations_csv,
    save_nrsfm_cameras_csv,
    save_pose_observations_csv,
)
from bilinrank_experiments import NrsfmScene, PoseScene, load_instance

OBSERVATIONS = "observations.csv"
CAMERAS = "cameras.csv"
MEASUREMENTS = "measurements.csv"


@dataclass(frozen=True)
class Problem:
    """Operator, measurements and (when stored) the ground truth."""

    kind: str
    op: MeasurementOp
    b: np.ndarray
    truth: Optional[np.ndarray] = None


def _optional_matrix(path: Path) -> Optional[np.ndarray]:
    return load_matrix_csv(path) if path.exists() else None


def _pose_problem(observations: Path, eta: float, truth: Optional[np.ndarray]) -> Problem:
    cams, points, uv = load_pose_observations_csv(observations)
    if cams.size == 0:
        raise ValidationError(f"{observations} holds no observations")
    op = PoseOp(int(cams.max()) + 1, int(points.max()) + 1, cams, points, uv, eta)
    if truth is not None and truth.shape != op.shape:
        truth = None
    return Problem("pose", op, op.rhs(), truth)


def load_problem(path: Path, eta: float = 0.5) -> Problem:
    """
    Load a problem directory (or a pose observations CSV).

    Args:
        path: Problem directory or observations file
        eta: pOSE mixing weight, used for pose problems only

    Raises:
        ValidationError: If the path matches none of the layouts
    """
    if path.is_file():
        return _pose_problem(path, eta, None)
    if not path.is_dir():
        raise ValidationError(f"Problem not found: {path}")

    if (path / "meta.json").exists():
        instance = load_instance(path)
        op = instance.operator()
        return Problem("completion", op, instance.measurements(), instance.M0)
    if (path / OBSERVATIONS).exists():
        return _pose_problem(path / OBSERVATIONS, eta, _optional_matrix(path / "X.csv"))
    if (path / CAMERAS).exists():
        cameras = load_nrsfm_cameras_csv(path / CAMERAS)
        measurements = load_matrix_csv(path / MEASUREMENTS)
        op = NrsfmOp(cameras, measurements.shape[1])
        return Problem("nrsfm", op, measurements.ravel(), _optional_matrix(path / "X_sharp.csv"))
    raise ValidationError(
        f"{path} is not a problem directory (expected meta.json, {OBSERVATIONS} or {CAMERAS})"
    )


def save_pose_scene(scene: PoseScene, directory: Path) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    save_pose_observations_csv(directory / OBSERVATIONS, scene.op)
    save_matrix_csv(directory / "X.csv", scene.X)
    return directory


def save_nrsfm_scene(scene: NrsfmScene, directory: Path) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    save_nrsfm_cameras_csv(directory / CAMERAS, scene.cameras)
    save_matrix_csv(directory / MEASUREMENTS, scene.op.measurements(scene.X_sharp))
    save_matrix_csv(directory / "X_sharp.csv", scene.X_sharp)
    return directory
