"""
Result models shared by the solvers, the certificate checker and the harness.

Matrices are held as numpy arrays in memory and serialize to nested lists, so
`report.model_dump_json()` gives a self-contained JSON document.
"""

from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple

import numpy as np
from bilinrank_common import VersionInfo
from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, PlainSerializer

from .penalty import Penalty


def _as_float_array(v: Any) -> Any:
    if v is None:
        return None
    return np.asarray(v, dtype=float)


NdArray = Annotated[
    np.ndarray,
    BeforeValidator(_as_float_array),
    PlainSerializer(lambda a: a.tolist(), return_type=list),
]

TerminationReason = Literal[
    "converged_obj",
    "converged_grad",
    "converged_residuals",
    "max_iters",
    "time_budget",
]


class IterationRecord(BaseModel):
    """
    One outer iteration of a solver.

    Attributes:
        iteration: 1-based iteration index
        objective: True objective R(X) + ||A(X) - b||^2 after the iteration
        surrogate: Majorizer value at the candidate (VarPro) or None
        damping: Damping used for the step (VarPro) or rho (ADMM)
        accepted: Whether the candidate replaced the iterate
        grad_norm: Projected-gradient norm (VarPro) or primal residual (ADMM)
    """

    model_config = ConfigDict(frozen=True)

    iteration: int
    objective: float
    surrogate: Optional[float] = None
    damping: float
    accepted: bool
    grad_norm: Optional[float] = None


class SolveReport(BaseModel):
    """
    Outcome of one solve.

    The accepted iterations of a VarPro report have a strictly decreasing
    objective; ADMM reports count the increases in `non_monotone_steps`.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    schema_version: str = VersionInfo.REPORT_SCHEMA
    solver: Literal["varpro", "admm"]
    penalty: Penalty
    X: NdArray
    B: Optional[NdArray] = None
    C: Optional[NdArray] = None
    trace: List[IterationRecord] = Field(default_factory=list)
    termination: TerminationReason
    iterations: int
    initial_objective: float
    final_objective: float
    seconds: float = 0.0
    non_monotone_steps: int = 0
    seed: Optional[int] = None

    @property
    def objective_trace(self) -> List[float]:
        """True objective per iteration."""
        return [record.objective for record in self.trace]

    @property
    def accepted_objectives(self) -> List[float]:
        """True objective at the initial point and after every accepted step."""
        return [self.initial_objective] + [r.objective for r in self.trace if r.accepted]


class CertificateReport(BaseModel):
    """
    Result of the global-optimality test on a rank-deficient solution.

    Attributes:
        status: certified / not_certified
        reasons: Every violated condition (empty when certified)
        notes: Caveats that do not affect the status
        sigma_z: Singular values of Z, descending
        interval: Closed forbidden interval [(1-delta) sqrt(mu), sqrt(mu) / (1-delta)]
        rank: Numerical rank of the solution
        k: Number of factor columns
        delta: Restricted-isometry constant supplied by the caller
        mu: Penalty weight
        op_norm: Estimated operator norm, when computed
        rank_objective_exact: True when R(X) equals mu * rank(X)
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    status: Literal["certified", "not_certified"]
    reasons: List[str] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)
    sigma_z: NdArray
    interval: Tuple[float, float]
    rank: int
    k: int
    delta: float
    mu: float
    op_norm: Optional[float] = None
    rank_objective_exact: Optional[bool] = None

    @property
    def certified(self) -> bool:
        return self.status == "certified"


def report_summary(report: SolveReport) -> Dict[str, Any]:
    """Scalar fields of a report (no matrices), for tables and logs."""
    return {
        "solver": report.solver,
        "penalty": str(report.penalty),
        "termination": report.termination,
        "iterations": report.iterations,
        "initial_objective": report.initial_objective,
        "final_objective": report.final_objective,
        "seconds": report.seconds,
        "non_monotone_steps": report.non_monotone_steps,
        "seed": report.seed,
    }
