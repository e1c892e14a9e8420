"""
Solver configuration models.

SolverConfig drives the reweighted VarPro solver, AdmmConfig the ADMM
baselines. Both can be built from keyword arguments, from a parsed YAML section
or from a key=value config file, where unprefixed keys belong to SolverConfig
and admm_-prefixed keys to AdmmConfig:

    penalty = fmu:mu=512
    k = 8
    lambda0 = 1e-2
    max_iters = 300
    admm_rho = 2.0
    admm_max_iters = 1000

Usage:
    from bilinrank_schema import SolverConfig, configs_from_key_values

    cfg = SolverConfig(penalty="fmu:mu=4", k=8)
    solver_cfg, admm_cfg = configs_from_key_values(values)
"""

import math
from typing import Any, Dict, Optional, Tuple

from bilinrank_common import (
    AdmmDefaults,
    SolverDefaults,
    SupportedValues,
    ValidationError,
    reject_unknown_keys,
    split_prefixed,
)
from pydantic import BaseModel, ConfigDict, field_validator, model_validator
from typing_extensions import Self

from .penalty import Penalty, parse_penalty


def _coerce_penalty(v: Any) -> Any:
    if isinstance(v, str):
        return parse_penalty(v)
    return v


def _check_positive(name: str, v: Optional[float]) -> None:
    if v is not None and (not math.isfinite(v) or v <= 0):
        raise ValidationError(f"{name} must be positive, got {v}")


class SolverConfig(BaseModel):
    """
    Configuration of the iteratively reweighted VarPro solver.

    Attributes:
        penalty: Singular-value penalty (must be differentiable away from 0)
        k: Number of factor columns (upper bound on the rank)
        lambda0: Initial damping
        lambda_up: Damping multiplier after a rejected step (> 1)
        lambda_down: Damping multiplier after an accepted step (in (0, 1))
        max_iters: Iteration limit
        tol_rel_obj: Relative objective change regarded as no progress
        tol_grad: Projected-gradient norm regarded as stationary
        seed: Seed of the random initialization
        budget_seconds: Optional wall-clock limit
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    penalty: Penalty
    k: int = 8
    lambda0: float = SolverDefaults.LAMBDA0
    lambda_up: float = SolverDefaults.LAMBDA_UP
    lambda_down: float = SolverDefaults.LAMBDA_DOWN
    max_iters: int = SolverDefaults.MAX_ITERS
    tol_rel_obj: float = SolverDefaults.TOL_REL_OBJ
    tol_grad: float = SolverDefaults.TOL_GRAD
    seed: int = 0
    budget_seconds: Optional[float] = None

    @field_validator("penalty", mode="before")
    @classmethod
    def parse_penalty_string(cls, v: Any) -> Any:
        """Accept the "kind:key=value" string form"""
        return _coerce_penalty(v)

    @field_validator("penalty")
    @classmethod
    def validate_penalty_differentiable(cls, v: Penalty) -> Penalty:
        """Reweighting needs a finite, informative derivative"""
        if v.kind.value in SupportedValues.NON_DIFFERENTIABLE_KINDS:
            raise ValidationError(
                f"Penalty '{v.kind.value}' cannot be used with the VarPro solver "
                "(its derivative is not a usable weight); use it with ADMM instead"
            )
        return v

    @field_validator("k", "max_iters")
    @classmethod
    def validate_counts(cls, v: int) -> int:
        if v < 1:
            raise ValidationError(f"k and max_iters must be >= 1, got {v}")
        return v

    @model_validator(mode="after")
    def validate_damping(self) -> Self:
        """lambda0 > 0 and 0 < lambda_down < 1 < lambda_up; tolerances positive"""
        _check_positive("lambda0", self.lambda0)
        _check_positive("tol_rel_obj", self.tol_rel_obj)
        _check_positive("tol_grad", self.tol_grad)
        _check_positive("budget_seconds", self.budget_seconds)
        if not 0 < self.lambda_down < 1:
            raise ValidationError(f"lambda_down must lie in (0, 1), got {self.lambda_down}")
        if not self.lambda_up > 1:
            raise ValidationError(f"lambda_up must be > 1, got {self.lambda_up}")
        return self


class AdmmConfig(BaseModel):
    """
    Configuration of the ADMM baseline.

    Attributes:
        penalty: fmu, nuclear or rank
        rho: Augmented-Lagrangian parameter (fixed)
        max_iters: Iteration limit
        tol_primal: Relative tolerance on ||X - Y||
        tol_dual: Relative tolerance on rho ||Y - Y_prev||
        seed: Recorded for replay; the iteration itself is deterministic
        budget_seconds: Optional wall-clock limit
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    penalty: Penalty
    rho: float = AdmmDefaults.RHO
    max_iters: int = AdmmDefaults.MAX_ITERS
    tol_primal: float = AdmmDefaults.TOL_PRIMAL
    tol_dual: float = AdmmDefaults.TOL_DUAL
    seed: int = 0
    budget_seconds: Optional[float] = None

    @field_validator("penalty", mode="before")
    @classmethod
    def parse_penalty_string(cls, v: Any) -> Any:
        """Accept the "kind:key=value" string form"""
        return _coerce_penalty(v)

    @field_validator("penalty")
    @classmethod
    def validate_penalty_supported(cls, v: Penalty) -> Penalty:
        if v.kind.value not in SupportedValues.ADMM_PENALTY_KINDS:
            raise ValidationError(
                f"ADMM supports penalties {', '.join(SupportedValues.ADMM_PENALTY_KINDS)}, "
                f"got '{v.kind.value}'"
            )
        return v

    @field_validator("max_iters")
    @classmethod
    def validate_max_iters(cls, v: int) -> int:
        if v < 1:
            raise ValidationError(f"max_iters must be >= 1, got {v}")
        return v

    @model_validator(mode="after")
    def validate_positive(self) -> Self:
        _check_positive("rho", self.rho)
        _check_positive("tol_primal", self.tol_primal)
        _check_positive("tol_dual", self.tol_dual)
        _check_positive("budget_seconds", self.budget_seconds)
        return self


SOLVER_KEYS = tuple(SolverConfig.model_fields)
ADMM_KEYS = tuple(AdmmConfig.model_fields)


def configs_from_key_values(
    values: Dict[str, str], overrides: Optional[Dict[str, Any]] = None
) -> Tuple[Dict[str, Any], Dict[str, Any]]:
    """
    Split a parsed key=value file into SolverConfig and AdmmConfig fields.

    Unprefixed keys go to the solver section, admm_-prefixed keys to the ADMM
    section. The ADMM section inherits `penalty`, `seed` and `budget_seconds` from the solver
    section unless it sets its own. `overrides` (CLI flags) win over file
    values and apply to both sections where the key exists.

    Returns:
        (solver_fields, admm_fields) ready for model_validate

    Raises:
        ConfigParseError: On an unknown key
    """
    plain, admm = split_prefixed(values, "admm_")
    reject_unknown_keys(plain, SOLVER_KEYS, "solver")
    reject_unknown_keys(admm, ADMM_KEYS, "admm")

    solver_fields: Dict[str, Any] = dict(plain)
    admm_fields: Dict[str, Any] = dict(admm)
    for key in ("penalty", "seed", "budget_seconds"):
        if key in solver_fields and key not in admm_fields:
            admm_fields[key] = solver_fields[key]

    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key in SOLVER_KEYS:
            solver_fields[key] = value
        if key in ADMM_KEYS:
            admm_fields[key] = value
    return solver_fields, admm_fields
