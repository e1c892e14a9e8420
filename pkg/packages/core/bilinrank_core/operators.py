"""
Linear measurement operators A: R^{m x n} -> R^p.

All operators act on matrices through their row-major vectorization vec(X)
(entry (i, j) at position i * n + j) and expose that action as a sparse
p x (m n) matrix, which the solvers use for Jacobian assembly.

Three operators are provided:

- MaskedOp: samples the entries with W[i, j] = 1, in row-major order
- PoseOp:   pOSE residuals of a stacked camera-point product (3F x n)
- NrsfmOp:  orthographic projection R X of a reshuffled shape matrix (F x 3n)
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path
from typing import Tuple

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from bilinrank_common import (
    CsvFormat,
    DimensionError,
    Tolerances,
    ValidationError,
    get_logger,
    validate_fraction,
    validate_matrix,
    validate_vector,
)

logger = get_logger("core.operators")


@dataclass(frozen=True)
class OpNormEstimate:
    """
    Power-iteration estimate of ||A|| with a guaranteed upper bound.

    The Rayleigh quotient never exceeds ||A||^2, so `value` approaches the norm
    from below. `upper` is sqrt(||A||_1 ||A||_inf) of the sparse matrix, which
    never falls below ||A||.

    Attributes:
        value: sqrt of the Rayleigh quotient of A*A at the final iterate
        residual: ||A*A v - value^2 v|| for the final unit vector v
        iterations: Number of power iterations performed
        upper: Upper bound on ||A||
    """

    value: float
    residual: float
    iterations: int
    upper: float


class MeasurementOp(ABC):
    """
    Abstract linear map from m x n matrices to p-vectors.

    Subclasses implement apply, adjoint and matrix; shape checks, residuals
    and the norm estimate are shared.
    """

    def __init__(self, rows: int, cols: int, size: int):
        self.rows = rows
        self.cols = cols
        self.size = size

    @property
    def shape(self) -> Tuple[int, int]:
        """Shape of the unknown matrix."""
        return (self.rows, self.cols)

    def _check_matrix(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.shape != self.shape:
            raise DimensionError(
                f"{type(self).__name__} expects a {self.rows}x{self.cols} matrix",
                expected=self.shape,
                got=X.shape,
            )
        return X

    def _check_vector(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if y.shape != (self.size,):
            raise DimensionError(
                f"{type(self).__name__} expects a vector of length {self.size}",
                expected=self.size,
                got=y.shape,
            )
        return y

    @abstractmethod
    def apply(self, X: np.ndarray) -> np.ndarray:
        """A(X), a p-vector."""

    @abstractmethod
    def adjoint(self, y: np.ndarray) -> np.ndarray:
        """A*(y), an m x n matrix."""

    @abstractmethod
    def matrix(self) -> sp.csr_matrix:
        """A as a sparse p x (m n) matrix acting on row-major vec(X)."""

    def residual(self, X: np.ndarray, b: np.ndarray) -> np.ndarray:
        """A(X) - b."""
        return self.apply(X) - self._check_vector(b)

    def normal(self, X: np.ndarray) -> np.ndarray:
        """A*(A(X))."""
        return self.adjoint(self.apply(X))

    def op_norm_bound(self, iterations: int = Tolerances.OP_NORM_ITERS) -> OpNormEstimate:
        """
        Bound ||A|| from both sides.

        Power iteration on A*A from a fixed start vector gives the (lower)
        estimate; the Schur bound sqrt(||A||_1 ||A||_inf) gives the upper one.
        The start vector is drawn from a fixed seed, so the estimate is
        reproducible.
        """
        if self.size == 0:
            return OpNormEstimate(0.0, 0.0, iterations, 0.0)
        A = self.matrix()
        upper = float(np.sqrt(spla.norm(A, 1) * spla.norm(A, np.inf)))

        v = np.random.default_rng(0).standard_normal(self.shape)
        v /= np.linalg.norm(v)
        for _ in range(iterations):
            w = self.normal(v)
            norm_w = np.linalg.norm(w)
            if norm_w == 0.0:
                return OpNormEstimate(0.0, 0.0, iterations, upper)
            v = w / norm_w
        w = self.normal(v)
        value_sq = float(np.vdot(v, w))
        residual = float(np.linalg.norm(w - value_sq * v))
        value = min(float(np.sqrt(max(value_sq, 0.0))), upper)
        return OpNormEstimate(value, residual, iterations, upper)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(rows={self.rows}, cols={self.cols}, size={self.size})"


# =============================================================================
# MASKED SAMPLING
# =============================================================================


class MaskedOp(MeasurementOp):
    """
    Entry sampling X -> (X[i, j] for W[i, j] = 1), row-major.

    adjoint scatters back into zeros, so adjoint(apply(X)) = W * X.
    """

    def __init__(self, W: np.ndarray):
        W = np.asarray(W)
        if W.ndim != 2:
            raise DimensionError("mask must be a matrix", expected="2-D", got=W.shape)
        if not np.all((W == 0) | (W == 1)):
            raise ValidationError("mask entries must be 0 or 1")
        self.mask = W.astype(bool)
        self.index = np.flatnonzero(self.mask.ravel())
        super().__init__(W.shape[0], W.shape[1], int(self.index.size))

    @property
    def observed_fraction(self) -> float:
        return self.size / (self.rows * self.cols)

    def apply(self, X: np.ndarray) -> np.ndarray:
        return self._check_matrix(X).ravel()[self.index]

    def adjoint(self, y: np.ndarray) -> np.ndarray:
        y = self._check_vector(y)
        out = np.zeros(self.rows * self.cols)
        out[self.index] = y
        return out.reshape(self.shape)

    def matrix(self) -> sp.csr_matrix:
        return sp.csr_matrix(
            (np.ones(self.size), (np.arange(self.size), self.index)),
            shape=(self.size, self.rows * self.cols),
        )

    def observe(self, M: np.ndarray) -> np.ndarray:
        """Measurement vector b of a full matrix M (same as apply)."""
        return self.apply(M)


# =============================================================================
# pOSE
# =============================================================================


class PoseOp(MeasurementOp):
    """
    pOSE residuals of the stacked product X = P Xh^T (3F x n).

    Block X[3i:3i+3, j] = (x1, x2, x3) holds camera i applied to point j. An
    observation (i, j, u, v) contributes four rows, in this order:

        sqrt(1 - eta) (x1 - u x3)      object-space error, u
        sqrt(1 - eta) (x2 - v x3)      object-space error, v
        sqrt(eta) x1                   affine error, u  (rhs sqrt(eta) u)
        sqrt(eta) x2                   affine error, v  (rhs sqrt(eta) v)

    so ||A(X) - rhs()||^2 = (1 - eta) l_ose + eta l_affine.
    """

    def __init__(
        self,
        num_cams: int,
        num_points: int,
        cams: np.ndarray,
        points: np.ndarray,
        uv: np.ndarray,
        eta: float,
    ):
        self.num_cams = int(num_cams)
        self.num_points = int(num_points)
        self.cams = np.asarray(cams, dtype=int)
        self.points = np.asarray(points, dtype=int)
        self.uv = np.asarray(uv, dtype=float)
        self.eta = validate_fraction("eta", float(eta), allow_one=True)

        nobs = self.cams.shape[0]
        if self.points.shape != (nobs,) or self.uv.shape != (nobs, 2):
            raise DimensionError(
                "observations must be cams (N,), points (N,), uv (N, 2)",
                expected=(nobs, 2),
                got=self.uv.shape,
            )
        if nobs and (self.cams.min() < 0 or self.cams.max() >= self.num_cams):
            raise ValidationError(f"camera ids must lie in [0, {self.num_cams})")
        if nobs and (self.points.min() < 0 or self.points.max() >= self.num_points):
            raise ValidationError(f"point ids must lie in [0, {self.num_points})")

        super().__init__(3 * self.num_cams, self.num_points, 4 * nobs)
        self._A = self._assemble()

    @property
    def num_observations(self) -> int:
        return int(self.cams.shape[0])

    def _entry(self, component: int) -> np.ndarray:
        return (3 * self.cams + component) * self.cols + self.points

    def _assemble(self) -> sp.csr_matrix:
        n_obs = self.num_observations
        s_ose = np.sqrt(1.0 - self.eta)
        s_aff = np.sqrt(self.eta)
        base = 4 * np.arange(n_obs)
        u, v = self.uv[:, 0], self.uv[:, 1]
        x1, x2, x3 = self._entry(0), self._entry(1), self._entry(2)

        rows = np.concatenate([base, base, base + 1, base + 1, base + 2, base + 3])
        cols = np.concatenate([x1, x3, x2, x3, x1, x2])
        vals = np.concatenate(
            [
                np.full(n_obs, s_ose),
                -s_ose * u,
                np.full(n_obs, s_ose),
                -s_ose * v,
                np.full(n_obs, s_aff),
                np.full(n_obs, s_aff),
            ]
        )
        A = sp.csr_matrix((vals, (rows, cols)), shape=(self.size, self.rows * self.cols))
        A.eliminate_zeros()
        return A

    def apply(self, X: np.ndarray) -> np.ndarray:
        return self._A @ self._check_matrix(X).ravel()

    def adjoint(self, y: np.ndarray) -> np.ndarray:
        return (self._A.T @ self._check_vector(y)).reshape(self.shape)

    def matrix(self) -> sp.csr_matrix:
        return self._A

    def rhs(self) -> np.ndarray:
        """Right-hand side b: zeros on the object-space rows, sqrt(eta) (u, v) on the affine rows."""
        b = np.zeros(self.size)
        s_aff = np.sqrt(self.eta)
        b[2::4] = s_aff * self.uv[:, 0]
        b[3::4] = s_aff * self.uv[:, 1]
        return b

    def ose_residual(self, X: np.ndarray) -> np.ndarray:
        """Unscaled object-space residuals (x1 - u x3, x2 - v x3), shape (N, 2)."""
        flat = self._check_matrix(X).ravel()
        x3 = flat[self._entry(2)]
        return np.column_stack(
            [flat[self._entry(0)] - self.uv[:, 0] * x3, flat[self._entry(1)] - self.uv[:, 1] * x3]
        )

    def affine_residual(self, X: np.ndarray) -> np.ndarray:
        """Unscaled affine residuals (x1 - u, x2 - v), shape (N, 2)."""
        flat = self._check_matrix(X).ravel()
        return np.column_stack([flat[self._entry(0)], flat[self._entry(1)]]) - self.uv

    def with_eta(self, eta: float) -> "PoseOp":
        """Same observations, different mixing weight."""
        return PoseOp(self.num_cams, self.num_points, self.cams, self.points, self.uv, eta)


# =============================================================================
# NON-RIGID SfM
# =============================================================================


def stacked_to_sharp(X: np.ndarray, frames: int) -> np.ndarray:
    """3F x n stacked shapes -> F x 3n with X_sharp[i, 3j + c] = X[3i + c, j]."""
    X = np.asarray(X, dtype=float)
    n = X.shape[1]
    return X.reshape(frames, 3, n).transpose(0, 2, 1).reshape(frames, 3 * n)


def sharp_to_stacked(X_sharp: np.ndarray) -> np.ndarray:
    """Inverse of stacked_to_sharp."""
    X_sharp = np.asarray(X_sharp, dtype=float)
    frames, three_n = X_sharp.shape
    n = three_n // 3
    return X_sharp.reshape(frames, n, 3).transpose(0, 2, 1).reshape(3 * frames, n)


class NrsfmOp(MeasurementOp):
    """
    X_sharp (F x 3n) -> vec(R X), with R = blockdiag(R_1, ..., R_F) and X the
    3F x n stacked shapes. Each camera block R_i is 2 x 3 with R_i R_i^T = I.

    The output is the row-major vectorization of the 2F x n measurement
    matrix (rows 2i and 2i + 1 belong to frame i).
    """

    def __init__(self, cameras: np.ndarray, num_points: int):
        R = np.asarray(cameras, dtype=float)
        if R.ndim != 3 or R.shape[1:] != (2, 3):
            raise DimensionError("cameras must have shape (F, 2, 3)", expected="(F, 2, 3)", got=R.shape)
        gram = np.einsum("iac,ibc->iab", R, R)
        err = np.abs(gram - np.eye(2)).max() if R.shape[0] else 0.0
        if err > 1e-10:
            raise ValidationError(f"camera rows must be orthonormal (max |R R^T - I| = {err:.3e})")
        self.cameras = R
        self.frames = R.shape[0]
        self.num_points = int(num_points)
        super().__init__(self.frames, 3 * self.num_points, 2 * self.frames * self.num_points)

    def apply(self, X: np.ndarray) -> np.ndarray:
        Xs = self._check_matrix(X).reshape(self.frames, self.num_points, 3)
        return np.einsum("iac,ijc->iaj", self.cameras, Xs).ravel()

    def adjoint(self, y: np.ndarray) -> np.ndarray:
        Y = self._check_vector(y).reshape(self.frames, 2, self.num_points)
        return np.einsum("iac,iaj->ijc", self.cameras, Y).reshape(self.shape)

    def matrix(self) -> sp.csr_matrix:
        F, n = self.frames, self.num_points
        i, a, j, c = np.meshgrid(
            np.arange(F), np.arange(2), np.arange(n), np.arange(3), indexing="ij"
        )
        rows = ((2 * i + a) * n + j).ravel()
        cols = (i * 3 * n + 3 * j + c).ravel()
        vals = self.cameras[i, a, c].ravel()
        A = sp.csr_matrix((vals, (rows, cols)), shape=(self.size, self.rows * self.cols))
        A.eliminate_zeros()
        return A

    def measurements(self, X_sharp: np.ndarray) -> np.ndarray:
        """The 2F x n measurement matrix R X."""
        return self.apply(X_sharp).reshape(2 * self.frames, self.num_points)


# =============================================================================
# FILES
# =============================================================================


def load_pose_observations_csv(path: Path) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Read pOSE observations with header cam_id,point_id,u,v.

    Returns:
        (cams, points, uv)
    """
    if not path.exists():
        raise ValidationError(f"Observation file not found: {path}")
    data = np.genfromtxt(path, delimiter=CsvFormat.DELIMITER, names=True, dtype=float)
    expected = ("cam_id", "point_id", "u", "v")
    if data.dtype.names != expected:
        raise ValidationError(f"{path}: expected columns {','.join(expected)}, got {data.dtype.names}")
    data = np.atleast_1d(data)
    return data["cam_id"].astype(int), data["point_id"].astype(int), np.column_stack([data["u"], data["v"]])


def save_pose_observations_csv(path: Path, op: PoseOp) -> None:
    """Write the observations of a PoseOp with header cam_id,point_id,u,v."""
    path.parent.mkdir(parents=True, exist_ok=True)
    table = np.column_stack([op.cams, op.points, op.uv])
    np.savetxt(
        path,
        table,
        fmt=["%d", "%d", CsvFormat.FLOAT_FMT, CsvFormat.FLOAT_FMT],
        delimiter=CsvFormat.DELIMITER,
        header="cam_id,point_id,u,v",
        comments="",
    )


def load_nrsfm_cameras_csv(path: Path) -> np.ndarray:
    """Read 2x3 camera blocks stored row-major, two lines per camera."""
    if not path.exists():
        raise ValidationError(f"Camera file not found: {path}")
    flat = validate_matrix("cameras", np.loadtxt(path, delimiter=CsvFormat.DELIMITER, ndmin=2))
    if flat.shape[1] != 3 or flat.shape[0] % 2:
        raise DimensionError(f"{path}: expected 2F lines of 3 values", expected="(2F, 3)", got=flat.shape)
    return flat.reshape(-1, 2, 3)


def save_nrsfm_cameras_csv(path: Path, cameras: np.ndarray) -> None:
    """Write camera blocks as 2F lines of 3 values."""
    path.parent.mkdir(parents=True, exist_ok=True)
    flat = np.asarray(cameras, dtype=float).reshape(-1, 3)
    np.savetxt(path, flat, fmt=CsvFormat.FLOAT_FMT, delimiter=CsvFormat.DELIMITER)


def check_rhs(op: MeasurementOp, b: np.ndarray) -> np.ndarray:
    """Validate a measurement vector against an operator."""
    return validate_vector("b", b, length=op.size)
