"""
Synthetic problem generation.

Every generator is a pure function of its arguments and seed. Randomness comes
from numpy's PCG64 bit generator; sub-streams for the different parts of one
instance are derived with SeedSequence so that, e.g., the mask of an instance
does not change when its noise level does.

Instances
---------
    M0 = U V^T                 U (m x r), V (n x r) standard normal
    M  = M0 + N                N_ij ~ Normal(0, sigma^2)
    W  = uniform_mask(...)     or tracking_mask(...)

An instance is stored as a directory with M0.csv, M.csv, W.csv and meta.json.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Optional, Tuple

import numpy as np
from bilinrank_common import (
    DatagenDefaults,
    DegenerateInstanceError,
    ValidationError,
    get_logger,
    load_mask_csv,
    load_matrix_csv,
    save_mask_csv,
    save_matrix_csv,
    validate_fraction,
    validate_nonnegative,
    validate_positive_int,
)
from bilinrank_core import MaskedOp, NrsfmOp, PoseOp, matrix_rank
from pydantic import BaseModel, ConfigDict

logger = get_logger("experiments.datagen")

MaskPattern = Literal["uniform", "tracking"]


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def derive_seed(seed: int, *keys: int) -> int:
    """Independent child seed for (seed, *keys)."""
    return int(np.random.SeedSequence([seed, *keys]).generate_state(1)[0])


# Sub-stream keys of one completion instance
_GROUND_TRUTH, _MASK, _NOISE = 0, 1, 2


# =============================================================================
# LOW-RANK GROUND TRUTH AND NOISE
# =============================================================================


def gen_low_rank(m: int, n: int, r: int, seed: int) -> np.ndarray:
    """
    M0 = U V^T with standard-normal U (m x r) and V (n x r).

    Redraws (bounded) when sigma_r(M0) <= 1e-6.

    Raises:
        ValidationError: If r > min(m, n) or a size is not positive
        DegenerateInstanceError: If every redraw is rank deficient
    """
    validate_positive_int("m", m)
    validate_positive_int("n", n)
    if not 0 <= r <= min(m, n):
        raise ValidationError(f"rank must lie in [0, min(m, n)] = [0, {min(m, n)}], got {r}")
    if r == 0:
        return np.zeros((m, n))

    rng = make_rng(seed)
    for _ in range(DatagenDefaults.SCENE_RETRIES):
        M0 = rng.standard_normal((m, r)) @ rng.standard_normal((n, r)).T
        s = np.linalg.svd(M0, compute_uv=False)
        if s[r - 1] > DatagenDefaults.MIN_SINGULAR_VALUE:
            return M0
    raise DegenerateInstanceError(
        f"could not draw a {m}x{n} matrix of rank {r} in {DatagenDefaults.SCENE_RETRIES} attempts"
    )


def add_noise(M0: np.ndarray, sigma: float, seed: int) -> np.ndarray:
    """M0 + N with N_ij ~ Normal(0, sigma^2); sigma = 0 returns an exact copy."""
    sigma = validate_nonnegative("sigma", sigma)
    M0 = np.asarray(M0, dtype=float)
    if sigma == 0.0:
        return M0.copy()
    return M0 + sigma * make_rng(seed).standard_normal(M0.shape)


def normalized_distance(X: np.ndarray, M0: np.ndarray) -> float:
    """||X - M0||_F / ||M0||_F."""
    norm = float(np.linalg.norm(M0))
    if norm == 0.0:
        raise ValidationError("normalized distance is undefined for a zero ground truth")
    return float(np.linalg.norm(np.asarray(X, dtype=float) - M0)) / norm


# =============================================================================
# MASKS
# =============================================================================


def _missing_fraction(W: np.ndarray) -> float:
    return 1.0 - float(np.count_nonzero(W)) / W.size


def _has_empty_line(W: np.ndarray) -> bool:
    return bool(np.any(~W.any(axis=0)) or np.any(~W.any(axis=1)))


def _fraction_checked(W: np.ndarray) -> bool:
    return W.size >= DatagenDefaults.FRACTION_CHECK_MIN_ENTRIES


def uniform_mask(m: int, n: int, missing_frac: float, seed: int, strict: bool = True) -> np.ndarray:
    """
    Each entry missing independently with probability missing_frac.

    Masks with at least 10^4 entries are redrawn (bounded) while the realized
    fraction is more than 1% off the target; in strict mode masks with an empty
    row or column are redrawn as well.

    Raises:
        DomainError: If missing_frac is outside [0, 1)
        DegenerateInstanceError: If no acceptable mask was drawn
    """
    missing_frac = validate_fraction("missing_frac", missing_frac)
    rng = make_rng(seed)
    for attempt in range(1, DatagenDefaults.MAX_RESAMPLES + 1):
        W = rng.random((m, n)) >= missing_frac
        off_target = (
            _fraction_checked(W)
            and abs(_missing_fraction(W) - missing_frac) > DatagenDefaults.FRACTION_TOL
        )
        if not off_target and not (strict and _has_empty_line(W)):
            return W.astype(int)
        logger.debug("Uniform mask redrawn", attempt=attempt, missing=_missing_fraction(W))
    raise DegenerateInstanceError(
        f"no acceptable {m}x{n} uniform mask at missing fraction {missing_frac} "
        f"after {DatagenDefaults.MAX_RESAMPLES} draws (strict={strict})"
    )


def _failure_frames(severity: float, u: np.ndarray, v: np.ndarray, frames: int) -> np.ndarray:
    """
    First unobserved frame of every track for a given severity in [0, 2].

    Up to severity 1 a fraction `severity` of the tracks may fail, at a frame
    uniform over {head, ..., frames} (frames = never). Beyond 1 every track may
    fail and the failure frame moves toward the head as v ** a, a -> infinity.
    """
    head = DatagenDefaults.TRACK_HEAD_FRAMES
    span = frames - head + 1
    if severity <= 1.0:
        f = head + np.floor(v * span).astype(int)
        return np.where(u < severity, np.minimum(f, frames), frames)
    exponent = 1.0 / max(2.0 - severity, 1e-12)
    return np.minimum(head + np.floor(v**exponent * span).astype(int), frames)


def _mask_from_failures(failures: np.ndarray, frames: int) -> np.ndarray:
    return (np.arange(frames)[:, None] < failures[None, :]).astype(int)


def _realized(failures: np.ndarray, frames: int) -> float:
    return float(np.sum(frames - failures)) / (frames * failures.size)


def _calibrated_tracking(
    frames: int, tracks: int, missing_frac: float, seed: int, strict: bool
) -> Tuple[np.ndarray, float]:
    """Tracking mask and the severity the calibration settled on."""
    validate_positive_int("frames", frames, minimum=DatagenDefaults.TRACK_HEAD_FRAMES + 1)
    validate_positive_int("tracks", tracks)
    missing_frac = validate_fraction("missing_frac", missing_frac)
    reachable = (frames - DatagenDefaults.TRACK_HEAD_FRAMES) / frames
    if missing_frac > reachable:
        raise DegenerateInstanceError(
            f"missing fraction {missing_frac} is unreachable with {frames} frames "
            f"(at most {reachable:.4f} when the first {DatagenDefaults.TRACK_HEAD_FRAMES} are observed)"
        )
    if missing_frac == 0.0:
        return np.ones((frames, tracks), dtype=int), 0.0

    rng = make_rng(seed)
    u = rng.random(tracks)
    v = rng.random(tracks)

    lo, hi = 0.0, 2.0
    for _ in range(DatagenDefaults.CALIBRATION_STEPS):
        mid = 0.5 * (lo + hi)
        if _realized(_failure_frames(mid, u, v, frames), frames) < missing_frac:
            lo = mid
        else:
            hi = mid
    severity = min(
        (lo, hi),
        key=lambda s: abs(_realized(_failure_frames(s, u, v, frames), frames) - missing_frac),
    )
    failures = _failure_frames(severity, u, v, frames)
    W = _mask_from_failures(failures, frames)

    realized = _missing_fraction(W)
    if _fraction_checked(W) and abs(realized - missing_frac) > DatagenDefaults.FRACTION_TOL:
        raise DegenerateInstanceError(
            f"tracking calibration reached {realized:.4f}, target {missing_frac}"
        )
    if strict and _has_empty_line(W):
        raise DegenerateInstanceError(
            f"tracking mask at missing fraction {missing_frac} leaves a frame without observations"
        )
    return W, severity


def tracking_mask(
    frames: int, tracks: int, missing_frac: float, seed: int, strict: bool = True
) -> np.ndarray:
    """
    Tracking-failure mask: every column is observed on a prefix of frames.

    The first three frames are always observed and a lost track never
    restarts. The severity of the failure process is calibrated by bisection
    on the realized fraction of one fixed set of random draws.

    Raises:
        DomainError: If missing_frac is outside [0, 1)
        DegenerateInstanceError: If the target exceeds (frames - 3) / frames, the
            calibration misses it by more than 1%, or (strict) a frame has no
            observation
    """
    W, _ = _calibrated_tracking(frames, tracks, missing_frac, seed, strict)
    return W


# =============================================================================
# COMPLETION INSTANCES
# =============================================================================


class InstanceMeta(BaseModel):
    """Provenance of a generated completion instance (meta.json)."""

    model_config = ConfigDict(frozen=True)

    rows: int
    cols: int
    rank: int
    pattern: MaskPattern
    missing_target: float
    missing_realized: float
    noise: float
    seed: int
    strict: bool = True
    severity: Optional[float] = None
    head_frames: int = DatagenDefaults.TRACK_HEAD_FRAMES
    rng: str = DatagenDefaults.RNG_NAME
    generator_version: str = DatagenDefaults.GENERATOR_VERSION


@dataclass(frozen=True)
class ProblemInstance:
    """Ground truth M0, measurements M = M0 + N and mask W."""

    M0: np.ndarray
    M: np.ndarray
    W: np.ndarray
    meta: InstanceMeta

    @property
    def sigma(self) -> float:
        return self.meta.noise

    @property
    def seed(self) -> int:
        return self.meta.seed

    def operator(self) -> MaskedOp:
        return MaskedOp(self.W)

    def measurements(self) -> np.ndarray:
        """Observed entries of M in row-major order."""
        return self.operator().observe(self.M)


def gen_instance(
    rows: int,
    cols: int,
    rank: int,
    pattern: MaskPattern,
    missing: float,
    noise: float,
    seed: int,
    strict: bool = True,
) -> ProblemInstance:
    """Generate one completion instance; rows play the role of frames for tracking masks."""
    M0 = gen_low_rank(rows, cols, rank, derive_seed(seed, _GROUND_TRUTH))
    M = add_noise(M0, noise, derive_seed(seed, _NOISE))
    severity = None
    if pattern == "uniform":
        W = uniform_mask(rows, cols, missing, derive_seed(seed, _MASK), strict=strict)
    elif pattern == "tracking":
        W, severity = _calibrated_tracking(rows, cols, missing, derive_seed(seed, _MASK), strict)
    else:
        raise ValidationError(f"Unknown mask pattern '{pattern}'. Allowed: uniform, tracking")

    meta = InstanceMeta(
        rows=rows,
        cols=cols,
        rank=rank,
        pattern=pattern,
        missing_target=missing,
        missing_realized=_missing_fraction(W),
        noise=noise,
        seed=seed,
        strict=strict,
        severity=severity,
    )
    logger.debug("Instance generated", pattern=pattern, missing=meta.missing_realized, seed=seed)
    return ProblemInstance(M0=M0, M=M, W=W, meta=meta)


def save_instance(instance: ProblemInstance, directory: Path) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    save_matrix_csv(directory / "M0.csv", instance.M0)
    save_matrix_csv(directory / "M.csv", instance.M)
    save_mask_csv(directory / "W.csv", instance.W)
    (directory / "meta.json").write_text(instance.meta.model_dump_json(indent=2), encoding="utf-8")
    return directory


def load_instance(directory: Path) -> ProblemInstance:
    """
    Read an instance directory written by save_instance.

    Raises:
        ValidationError: If a file is missing or malformed
    """
    meta_path = directory / "meta.json"
    if not meta_path.exists():
        raise ValidationError(f"Instance metadata not found: {meta_path}")
    meta = InstanceMeta.model_validate_json(meta_path.read_text(encoding="utf-8"))
    return ProblemInstance(
        M0=load_matrix_csv(directory / "M0.csv"),
        M=load_matrix_csv(directory / "M.csv"),
        W=load_mask_csv(directory / "W.csv").astype(int),
        meta=meta,
    )


# =============================================================================
# GEOMETRIC SCENES
# =============================================================================


def _random_rotation(rng: np.random.Generator) -> np.ndarray:
    Q, R = np.linalg.qr(rng.standard_normal((3, 3)))
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0:
        Q[:, 2] *= -1.0
    return Q


@dataclass(frozen=True)
class PoseScene:
    """
    Synthetic pOSE problem.

    Attributes:
        op: pOSE operator holding the observations
        b: Right-hand side op.rhs()
        X: Ground-truth stacked camera-point matrix P X^T (3F x n, rank <= 4)
        cameras: F x 3 x 4 camera matrices
        points: n x 4 homogeneous points
    """

    op: PoseOp
    b: np.ndarray
    X: np.ndarray
    cameras: np.ndarray
    points: np.ndarray


def _pose_cameras(rng: np.random.Generator, num_cams: int, projective: bool) -> np.ndarray:
    cams = np.zeros((num_cams, 3, 4))
    for i in range(num_cams):
        R = _random_rotation(rng)
        if projective:
            cams[i, :, :3] = R
            cams[i, :2, 3] = rng.standard_normal(2)
            cams[i, 2, 3] = 10.0
        else:
            # weak perspective: unit projective depth for every point
            cams[i, :2, :3] = rng.uniform(0.5, 2.0) * R[:2]
            cams[i, :2, 3] = rng.standard_normal(2)
            cams[i, 2, 3] = 1.0
    return cams


def _observation_pattern(
    rng: np.random.Generator, num_cams: int, num_points: int, missing_frac: float
) -> Optional[np.ndarray]:
    W = rng.random((num_cams, num_points)) >= missing_frac
    # every point needs two views, every camera some points
    if np.any(W.sum(axis=0) < 2) or np.any(W.sum(axis=1) < 1):
        return None
    return W


def gen_pose_scene(
    num_cams: int,
    num_points: int,
    eta: float,
    seed: int,
    projective: bool = False,
    missing_frac: float = 0.0,
) -> PoseScene:
    """
    Random cameras and points with exact projections.

    Weak-perspective cameras (the default) give a ground truth with zero pOSE
    residual for every eta; projective cameras zero the object-space part only.
    The geometry depends on the seed alone, so scenes that differ only in eta
    share the ground truth.

    Raises:
        ValidationError: If num_cams < 2 or num_points < 8
        DegenerateInstanceError: If no valid scene is found in the retry budget
    """
    validate_positive_int("num_cams", num_cams, minimum=2)
    validate_positive_int("num_points", num_points, minimum=8)
    eta = validate_fraction("eta", eta, allow_one=True)
    missing_frac = validate_fraction("missing_frac", missing_frac)
    rng = make_rng(seed)

    for attempt in range(1, DatagenDefaults.SCENE_RETRIES + 1):
        cams = _pose_cameras(rng, num_cams, projective)
        points = np.hstack([rng.standard_normal((num_points, 3)), np.ones((num_points, 1))])
        X = np.vstack([P @ points.T for P in cams])
        depths = X[2::3]
        W = _observation_pattern(rng, num_cams, num_points, missing_frac)
        if np.all(depths > 1e-3) and W is not None and matrix_rank(X) == 4:
            break
        logger.debug("Pose scene redrawn", attempt=attempt)
    else:
        raise DegenerateInstanceError(
            f"no valid pose scene with {num_cams} cameras and {num_points} points "
            f"in {DatagenDefaults.SCENE_RETRIES} attempts"
        )

    cam_ids, point_ids = np.nonzero(W)
    uv = np.stack(
        [X[3 * cam_ids, point_ids], X[3 * cam_ids + 1, point_ids]], axis=1
    ) / X[3 * cam_ids + 2, point_ids][:, None]
    op = PoseOp(num_cams, num_points, cam_ids, point_ids, uv, eta)
    return PoseScene(op=op, b=op.rhs(), X=X, cameras=cams, points=points)


@dataclass(frozen=True)
class NrsfmScene:
    """
    Synthetic orthographic non-rigid scene.

    Attributes:
        op: Measurement operator R X# for the cameras
        b: Measurements op.apply(X#)
        X_sharp: Ground-truth F x 3n shape matrix of rank <= K
        cameras: F x 2 x 3 cameras with orthonormal rows
        coefficients: F x K shape coefficients
        basis: K x 3 x n shape basis
    """

    op: NrsfmOp
    b: np.ndarray
    X_sharp: np.ndarray
    cameras: np.ndarray
    coefficients: np.ndarray
    basis: np.ndarray


def gen_nrsfm_scene(frames: int, num_points: int, basis_size: int, seed: int) -> NrsfmScene:
    """
    Shapes from a K-dimensional basis seen by random orthographic cameras.

    X#[i, 3j + c] = sum_k coefficients[i, k] basis[k, c, j].

    Raises:
        ValidationError: If basis_size is outside [1, min(frames, 3 num_points)]
    """
    validate_positive_int("frames", frames)
    validate_positive_int("num_points", num_points)
    if not 1 <= basis_size <= min(frames, 3 * num_points):
        raise ValidationError(
            f"basis size must lie in [1, min(frames, 3 * points)] = "
            f"[1, {min(frames, 3 * num_points)}], got {basis_size}"
        )
    rng = make_rng(seed)
    basis = rng.standard_normal((basis_size, 3, num_points))
    coefficients = rng.standard_normal((frames, basis_size))
    X_sharp = coefficients @ basis.transpose(0, 2, 1).reshape(basis_size, 3 * num_points)
    cameras = np.stack([_random_rotation(rng)[:2] for _ in range(frames)])
    op = NrsfmOp(cameras, num_points)
    return NrsfmScene(
        op=op,
        b=op.apply(X_sharp),
        X_sharp=X_sharp,
        cameras=cameras,
        coefficients=coefficients,
        basis=basis,
    )

