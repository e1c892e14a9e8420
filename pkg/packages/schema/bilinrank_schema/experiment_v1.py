"""
bilinrank Experiment Spec v1

Pydantic models for experiment files. An experiment file is a YAML document
describing one harness run: which experiment, on which synthetic instances,
with which solvers and how many repetitions.

Design Principles:
- Pure validation: receives dicts, validates structure, returns typed objects
- No file I/O: reading the YAML and expanding ${VAR} is the harness's job
- Strict: unknown keys are rejected so that typos cannot silently change results

Example (table1):

    version: "1"
    kind: table1
    master_seed: 2024
    repetitions: 20
    output: results/table1.csv
    instance: {rows: 32, cols: 512, rank: 4, k: 8}
    table1:
      patterns: [uniform, tracking]
      missing_levels: [0.0, 0.1, 0.2, 0.3, 0.4, 0.5]
      noise_levels: [0.0, 0.1]
    solvers: [varpro, admm_fmu, admm_nuclear]

Usage:
    from bilinrank_schema import ExperimentSpec

    spec = ExperimentSpec.model_validate(yaml.safe_load(text))
"""

import math
from typing import List, Literal, Optional

from bilinrank_common import (
    AdmmDefaults,
    HarnessDefaults,
    SolverDefaults,
    SupportedValues,
    ValidationError,
    VersionInfo,
)
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from typing_extensions import Self

ExperimentKind = Literal["table1", "sweep", "bias", "pose", "nrsfm"]
SolverName = Literal["varpro", "admm_fmu", "admm_nuclear", "admm_rank"]
MaskPattern = Literal["uniform", "tracking"]


def _non_empty(name: str, values: List) -> None:
    if not values:
        raise ValidationError(f"{name} must not be empty")


# =============================================================================
# INSTANCE AND SOLVER SECTIONS
# =============================================================================


class InstanceSpec(BaseModel):
    """
    Low-rank completion instance parameters.

    `pattern`, `missing` and `noise` are used by the sweep experiment; table1
    iterates over its own grids instead.
    """

    model_config = ConfigDict(extra="forbid")

    rows: int = HarnessDefaults.ROWS
    cols: int = HarnessDefaults.COLS
    rank: int = HarnessDefaults.RANK
    k: int = HarnessDefaults.K
    pattern: MaskPattern = "uniform"
    missing: float = 0.0
    noise: float = 0.0
    strict: bool = True

    @model_validator(mode="after")
    def validate_sizes(self) -> Self:
        """rank <= min(rows, cols), k >= 1, fractions in range"""
        if self.rows < 1 or self.cols < 1:
            raise ValidationError(f"rows and cols must be >= 1, got {self.rows}x{self.cols}")
        if not 0 <= self.rank <= min(self.rows, self.cols):
            raise ValidationError(
                f"rank must lie in [0, min(rows, cols)] = [0, {min(self.rows, self.cols)}], "
                f"got {self.rank}"
            )
        if self.k < 1:
            raise ValidationError(f"k must be >= 1, got {self.k}")
        if not 0 <= self.missing < 1:
            raise ValidationError(f"missing must lie in [0, 1), got {self.missing}")
        if self.noise < 0:
            raise ValidationError(f"noise must be >= 0, got {self.noise}")
        return self


class VarproSettings(BaseModel):
    """SolverConfig fields the harness lets an experiment override."""

    model_config = ConfigDict(extra="forbid")

    lambda0: float = SolverDefaults.LAMBDA0
    lambda_up: float = SolverDefaults.LAMBDA_UP
    lambda_down: float = SolverDefaults.LAMBDA_DOWN
    max_iters: int = SolverDefaults.MAX_ITERS
    tol_rel_obj: float = SolverDefaults.TOL_REL_OBJ
    tol_grad: float = SolverDefaults.TOL_GRAD


class AdmmSettings(BaseModel):
    """AdmmConfig fields the harness lets an experiment override."""

    model_config = ConfigDict(extra="forbid")

    rho: float = AdmmDefaults.RHO
    max_iters: int = AdmmDefaults.MAX_ITERS
    tol_primal: float = AdmmDefaults.TOL_PRIMAL
    tol_dual: float = AdmmDefaults.TOL_DUAL
    # Give each ADMM run the wall-clock time its VarPro partner needed
    match_varpro_time: bool = True


# =============================================================================
# EXPERIMENT-SPECIFIC SECTIONS
# =============================================================================


class Table1Grid(BaseModel):
    """Missing-data grid of the Table-1 protocol."""

    model_config = ConfigDict(extra="forbid")

    patterns: List[MaskPattern] = Field(default_factory=lambda: ["uniform", "tracking"])
    missing_levels: List[float] = Field(
        default_factory=lambda: list(HarnessDefaults.MISSING_LEVELS)
    )
    noise_levels: List[float] = Field(default_factory=lambda: list(HarnessDefaults.NOISE_LEVELS))

    @model_validator(mode="after")
    def validate_grids(self) -> Self:
        _non_empty("table1.patterns", self.patterns)
        _non_empty("table1.missing_levels", self.missing_levels)
        _non_empty("table1.noise_levels", self.noise_levels)
        for frac in self.missing_levels:
            if not 0 <= frac < 1:
                raise ValidationError(f"missing level must lie in [0, 1), got {frac}")
        for sigma in self.noise_levels:
            if sigma < 0:
                raise ValidationError(f"noise level must be >= 0, got {sigma}")
        return self


class BiasSpec(BaseModel):
    """
    Singular-value bias comparison.

    X0 has `values` singular values, descending; the upper half lie in
    [high_min, high_max] and the lower half in [low_min, low_max]. Every
    regularizer uses the smallest weight that zeroes the lower half.
    """

    model_config = ConfigDict(extra="forbid")

    size: int = 20
    values: int = HarnessDefaults.BIAS_VALUES
    high_min: float = 4.0
    high_max: float = 10.0
    low_min: float = 0.5
    low_max: float = 2.0
    schatten_q: List[float] = Field(default_factory=lambda: [0.5, 2.0 / 3.0])

    @model_validator(mode="after")
    def validate_spectrum(self) -> Self:
        if self.values < 2 or self.values > self.size:
            raise ValidationError(f"values must lie in [2, size={self.size}], got {self.values}")
        if not 0 < self.low_min <= self.low_max < self.high_min <= self.high_max:
            raise ValidationError(
                "bias spectrum must satisfy 0 < low_min <= low_max < high_min <= high_max"
            )
        for q in self.schatten_q:
            if not 0 < q <= 1:
                raise ValidationError(f"schatten_q entries must lie in (0, 1], got {q}")
        return self


class PoseSpec(BaseModel):
    """Synthetic pOSE scenes."""

    model_config = ConfigDict(extra="forbid")

    frames: int = 10
    points: int = 50
    etas: List[float] = Field(default_factory=lambda: list(HarnessDefaults.POSE_ETAS))
    projective: bool = False
    missing: float = 0.0
    k: int = 8

    @model_validator(mode="after")
    def validate_scene(self) -> Self:
        if self.frames < 2:
            raise ValidationError(f"pose.frames must be >= 2, got {self.frames}")
        if self.points < 8:
            raise ValidationError(f"pose.points must be >= 8, got {self.points}")
        _non_empty("pose.etas", self.etas)
        for eta in self.etas:
            if not 0 <= eta <= 1:
                raise ValidationError(f"eta must lie in [0, 1], got {eta}")
        if not 0 <= self.missing < 1:
            raise ValidationError(f"pose.missing must lie in [0, 1), got {self.missing}")
        return self


class NrsfmSpec(BaseModel):
    """Synthetic non-rigid scenes."""

    model_config = ConfigDict(extra="forbid")

    frames: int = 20
    points: int = 30
    basis: int = 2
    k: int = 8

    @model_validator(mode="after")
    def validate_scene(self) -> Self:
        if self.frames < 1 or self.points < 1:
            raise ValidationError("nrsfm.frames and nrsfm.points must be >= 1")
        if not 1 <= self.basis <= min(self.frames, 3 * self.points):
            raise ValidationError(
                f"nrsfm.basis must lie in [1, min(frames, 3*points)], got {self.basis}"
            )
        return self


# =============================================================================
# ROOT MODEL
# =============================================================================


class ExperimentSpec(BaseModel):
    """
    Root model for experiment files.

    Every run's seed is derived from (master_seed, run index), so two runs of
    the same spec produce identical rows.
    """

    model_config = ConfigDict(extra="forbid")

    version: str = "1"
    kind: ExperimentKind
    master_seed: int = 0
    repetitions: int = HarnessDefaults.REPETITIONS
    output: Optional[str] = None
    workers: int = 1
    record_timing: bool = True
    budget_seconds: Optional[float] = None
    solvers: List[SolverName] = Field(default_factory=lambda: ["varpro"])
    mu: Optional[float] = None
    mu_grid: List[float] = Field(default_factory=list)
    delta: float = 0.0
    instance: InstanceSpec = Field(default_factory=InstanceSpec)
    varpro: VarproSettings = Field(default_factory=VarproSettings)
    admm: AdmmSettings = Field(default_factory=AdmmSettings)
    table1: Table1Grid = Field(default_factory=Table1Grid)
    bias: BiasSpec = Field(default_factory=BiasSpec)
    pose: PoseSpec = Field(default_factory=PoseSpec)
    nrsfm: NrsfmSpec = Field(default_factory=NrsfmSpec)

    @field_validator("version", mode="before")
    @classmethod
    def validate_version_supported(cls, v: object) -> str:
        """Validate experiment spec version is supported (YAML may give an int)"""
        v = str(v)
        if v not in VersionInfo.EXPERIMENT_SPEC_SUPPORTED:
            raise ValidationError(
                f"Unsupported experiment spec version: '{v}'. "
                f"Supported versions: {', '.join(VersionInfo.EXPERIMENT_SPEC_SUPPORTED)}"
            )
        return v

    @field_validator("repetitions", "workers")
    @classmethod
    def validate_at_least_one(cls, v: int) -> int:
        if v < 1:
            raise ValidationError(f"repetitions and workers must be >= 1, got {v}")
        return v

    @field_validator("mu_grid")
    @classmethod
    def validate_mu_grid(cls, v: List[float]) -> List[float]:
        for mu in v:
            if not math.isfinite(mu) or mu <= 0:
                raise ValidationError(f"mu_grid entries must be positive, got {mu}")
        return v

    @model_validator(mode="after")
    def validate_kind_requirements(self) -> Self:
        """Sweeps need a weight grid; solvers must be known; delta in [0, 1)"""
        if self.kind in ("sweep", "pose", "nrsfm"):
            _non_empty(f"mu_grid (required for {self.kind})", self.mu_grid)
        _non_empty("solvers", self.solvers)
        for name in self.solvers:
            if name not in SupportedValues.SOLVERS:
                raise ValidationError(f"Unknown solver '{name}'")
        if self.mu is not None and (not math.isfinite(self.mu) or self.mu <= 0):
            raise ValidationError(f"mu must be positive, got {self.mu}")
        if not 0 <= self.delta < 1:
            raise ValidationError(f"delta must lie in [0, 1), got {self.delta}")
        if self.budget_seconds is not None and self.budget_seconds <= 0:
            raise ValidationError(f"budget_seconds must be positive, got {self.budget_seconds}")
        return self

    def table1_mu(self) -> float:
        """Weight for table1 runs: mu = max(m, n) unless overridden."""
        if self.mu is not None:
            return self.mu
        return float(max(self.instance.rows, self.instance.cols))
