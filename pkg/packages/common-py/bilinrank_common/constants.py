"""
bilinrank Shared Constants

This module defines constants used across multiple bilinrank packages.
It is the single source of truth for solver defaults, numerical tolerances,
generator settings and file-format versions.

All constants are organized into namespaced frozen dataclasses for:
- Type safety and IDE autocomplete
- Immutability (frozen=True prevents modification)
- Clear organization by domain

Usage:
    from bilinrank_common.constants import SolverDefaults, Tolerances

    damping = SolverDefaults.LAMBDA0
    rank_tol = Tolerances.RANK_REL
"""

from dataclasses import dataclass
from typing import Tuple

# =============================================================================
# VERSION INFORMATION
# =============================================================================


@dataclass(frozen=True)
class _VersionInfo:
    """Version information for bilinrank artifacts."""

    PACKAGE: str = "0.1.0"
    CSV_SCHEMA: str = "v1"
    REPORT_SCHEMA: str = "1"
    EXPERIMENT_SPEC_SUPPORTED: Tuple[str, ...] = ("1",)


VersionInfo = _VersionInfo()

BILINRANK_VERSION = VersionInfo.PACKAGE


# =============================================================================
# SUPPORTED VALUES
# =============================================================================


@dataclass(frozen=True)
class _SupportedValues:
    """Supported values for various configuration options."""

    PENALTY_KINDS: Tuple[str, ...] = (
        "fmu",
        "nuclear",
        "scad",
        "log",
        "mcp",
        "etp",
        "geman",
        "rank",
        "schatten",
    )
    # Kinds whose derivative is unusable as a reweighting weight (infinite or
    # identically zero away from the origin)
    NON_DIFFERENTIABLE_KINDS: Tuple[str, ...] = ("rank", "schatten")
    ADMM_PENALTY_KINDS: Tuple[str, ...] = ("fmu", "nuclear", "rank")
    MASK_PATTERNS: Tuple[str, ...] = ("uniform", "tracking")
    EXPERIMENT_KINDS: Tuple[str, ...] = ("table1", "sweep", "bias", "pose", "nrsfm")
    SOLVERS: Tuple[str, ...] = ("varpro", "admm_fmu", "admm_nuclear", "admm_rank")
    LOG_LEVELS: Tuple[str, ...] = ("debug", "info", "warn", "error")


SupportedValues = _SupportedValues()

SUPPORTED_PENALTY_KINDS = list(SupportedValues.PENALTY_KINDS)
SUPPORTED_SOLVERS = list(SupportedValues.SOLVERS)
LOG_LEVELS = list(SupportedValues.LOG_LEVELS)


# =============================================================================
# SOLVER DEFAULTS
# =============================================================================


@dataclass(frozen=True)
class _SolverDefaults:
    """
    Defaults for the iteratively reweighted VarPro solver.

    Usage:
        from bilinrank_common.constants import SolverDefaults

        lam = cfg.lambda0 or SolverDefaults.LAMBDA0
    """

    LAMBDA0: float = 1e-2
    LAMBDA_UP: float = 10.0
    LAMBDA_DOWN: float = 0.1
    # Above this damping no step can change the iterate in double precision
    LAMBDA_MAX: float = 1e16
    MAX_ITERS: int = 500
    TOL_REL_OBJ: float = 1e-10
    TOL_GRAD: float = 1e-12
    # Consecutive accepted steps below TOL_REL_OBJ before declaring convergence
    CONSECUTIVE_SMALL_STEPS: int = 5


SolverDefaults = _SolverDefaults()


# =============================================================================
# ADMM DEFAULTS
# =============================================================================


@dataclass(frozen=True)
class _AdmmDefaults:
    """Defaults for the ADMM baseline solvers."""

    RHO: float = 1.0
    MAX_ITERS: int = 500
    TOL_PRIMAL: float = 1e-9
    TOL_DUAL: float = 1e-9
    # Abort when the objective exceeds this multiple of the initial objective
    DIVERGENCE_FACTOR: float = 1e6


AdmmDefaults = _AdmmDefaults()


# =============================================================================
# NUMERICAL TOLERANCES
# =============================================================================


@dataclass(frozen=True)
class _Tolerances:
    """Numerical tolerances shared by the solvers, certificates and harness."""

    # sigma_i <= RANK_REL * sigma_1 counts as zero
    RANK_REL: float = 1e-9
    # rank threshold used when reporting sweep rows
    SWEEP_RANK_REL: float = 1e-6
    # closed-interval membership slack for the certificate test
    CERTIFICATE_ABS: float = 1e-12
    # surrogate == regularizer after rebalancing
    SURROGATE_EQUALITY: float = 1e-8
    # relative pivot threshold for pseudo-inverting C normal-matrix blocks
    BLOCK_PINV_REL: float = 1e-12
    OP_NORM_ITERS: int = 50


Tolerances = _Tolerances()


# =============================================================================
# PENALTY VALIDATION GRID
# =============================================================================


@dataclass(frozen=True)
class _PenaltyGrid:
    """Sampling grid used to check the concavity/monotonicity hypotheses."""

    POINTS: int = 512
    SPAN: float = 10.0  # grid covers [0, SPAN * characteristic scale]
    TOL_ZERO: float = 1e-9
    TOL_SHAPE: float = 1e-8
    # Samples of g'(x) = f'(x) + 2(x - y) used to bracket roots in the numeric prox
    PROX_BRACKETS: int = 257


PenaltyGrid = _PenaltyGrid()


# =============================================================================
# DATA GENERATION DEFAULTS
# =============================================================================


@dataclass(frozen=True)
class _DatagenDefaults:
    """Defaults for synthetic problem generation."""

    RNG_NAME: str = "numpy.PCG64"
    GENERATOR_VERSION: str = "1"
    # Frames always observed at the start of a track
    TRACK_HEAD_FRAMES: int = 3
    # Allowed deviation of a realized missing fraction from the target
    FRACTION_TOL: float = 0.01
    # Masks smaller than this are not checked against FRACTION_TOL
    FRACTION_CHECK_MIN_ENTRIES: int = 10_000
    MAX_RESAMPLES: int = 10
    MIN_SINGULAR_VALUE: float = 1e-6
    SCENE_RETRIES: int = 10
    CALIBRATION_STEPS: int = 60


DatagenDefaults = _DatagenDefaults()


# =============================================================================
# HARNESS DEFAULTS
# =============================================================================


@dataclass(frozen=True)
class _HarnessDefaults:
    """Defaults for the experiment harness (Table-1 style protocol)."""

    ROWS: int = 32
    COLS: int = 512
    RANK: int = 4
    K: int = 8
    REPETITIONS: int = 20
    MISSING_LEVELS: Tuple[float, ...] = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5)
    NOISE_LEVELS: Tuple[float, ...] = (0.0, 0.1)
    POSE_ETAS: Tuple[float, ...] = (0.1, 0.5, 0.9)
    BIAS_VALUES: int = 10
    BEST_RANK: int = 4


HarnessDefaults = _HarnessDefaults()


# =============================================================================
# CSV FORMAT
# =============================================================================


@dataclass(frozen=True)
class _CsvFormat:
    """Result and matrix file conventions."""

    HEADER_PREFIX: str = "# bilinrank-csv"
    FLOAT_FMT: str = "%.17g"
    DELIMITER: str = ","


CsvFormat = _CsvFormat()


# =============================================================================
# EXIT CODES
# =============================================================================


@dataclass(frozen=True)
class _ExitCodes:
    """Process exit codes of the CLI."""

    OK: int = 0
    FATAL: int = 1
    RUN_FAILURES: int = 2


ExitCodes = _ExitCodes()


# =============================================================================
# ENVIRONMENT VARIABLES
# =============================================================================


@dataclass(frozen=True)
class _EnvVars:
    """Environment variables read by the CLI."""

    LOG_LEVEL: str = "BILINRANK_LOG_LEVEL"
    WORKERS: str = "BILINRANK_WORKERS"


EnvVars = _EnvVars()
