"""
Global-optimality certificate for rank-deficient solutions.

Given balanced factors with rank(B C^T) < k, let

    Z = (I - A*A) B C^T + A*b

If no singular value of Z lies in [(1 - delta) sqrt(mu), sqrt(mu) / (1 - delta)],
where delta is a restricted-isometry constant of A for rank 2k, then B C^T is
the global minimizer of the fmu-regularized problem. The interval is treated
as closed.
"""

import math
from typing import List

import numpy as np
from bilinrank_common import Tolerances, ValidationError, get_logger, validate_fraction
from bilinrank_schema import CertificateReport, Penalty, PenaltyKind

from .factorization import (
    FactorPair,
    factored_svd,
    numerical_rank,
    rebalance,
    reg_value_factored,
    singular_values,
    surrogate_value,
)
from .operators import MeasurementOp, check_rhs

logger = get_logger("core.certificate")


def compute_Z(op: MeasurementOp, b: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Z = X - A*(A(X)) + A*(b)."""
    X = np.asarray(X, dtype=float)
    b = check_rhs(op, b)
    return X - op.normal(X) + op.adjoint(b)


def forbidden_interval(mu: float, delta: float) -> tuple[float, float]:
    root = math.sqrt(mu)
    return ((1.0 - delta) * root, root / (1.0 - delta))


def check_optimality(
    Z: np.ndarray, mu: float, delta: float, k: int, X: np.ndarray
) -> CertificateReport:
    """
    Test the certificate conditions on Z and the solution X.

    Certified iff rank(X) < k (numerical rank at 1e-9 sigma_1) and every
    singular value of Z lies outside the closed forbidden interval.
    """
    if not mu > 0:
        raise ValidationError(f"mu must be positive, got {mu}")
    delta = validate_fraction("delta", delta)

    sigma_z = singular_values(Z)
    rank = numerical_rank(singular_values(X), Tolerances.RANK_REL)
    lo, hi = forbidden_interval(mu, delta)
    tol = Tolerances.CERTIFICATE_ABS

    reasons: List[str] = []
    notes: List[str] = []
    if rank >= k:
        reasons.append(f"rank_precondition: rank(X) = {rank} is not below k = {k}")
    for i, s in enumerate(sigma_z):
        if lo - tol <= s <= hi + tol:
            reasons.append(f"interval: sigma_{i + 1}(Z) = {s!r} lies in [{lo!r}, {hi!r}]")
    if delta == 0.0:
        notes.append(
            "delta = 0: the interval is the single point sqrt(mu); "
            "the certificate assumes A is an isometry on rank-2k matrices"
        )

    return CertificateReport(
        status="not_certified" if reasons else "certified",
        reasons=reasons,
        notes=notes,
        sigma_z=sigma_z,
        interval=(lo, hi),
        rank=rank,
        k=k,
        delta=delta,
        mu=mu,
    )


def certificate_mu(p: Penalty) -> float:
    """
    The weight mu of a penalty that coincides with fmu(mu) near the threshold.

    Raises:
        ValidationError: For penalties the certificate does not cover
    """
    if p.kind in (PenaltyKind.FMU, PenaltyKind.RANK):
        return float(p.mu)
    if p.kind == PenaltyKind.MCP and p.gamma == 1.0:
        return float(p.lam) ** 2
    raise ValidationError(
        f"the optimality certificate covers fmu, rank and mcp with gamma = 1, got '{p.kind.value}'"
    )


def certify(
    op: MeasurementOp,
    b: np.ndarray,
    F: FactorPair,
    penalty: Penalty,
    delta: float = 0.0,
) -> CertificateReport:
    """
    Rebalance F, then run the certificate test on B C^T.

    Besides the interval and rank conditions, the rebalanced surrogate must
    equal R(B C^T); the report also notes when the estimated ||A|| exceeds 1
    and records whether R(X) = mu * rank(X).
    """
    mu = certificate_mu(penalty)
    F = rebalance(F)
    X = F.product()
    report = check_optimality(compute_Z(op, b, X), mu, delta, F.k, X)

    reasons = list(report.reasons)
    notes = list(report.notes)

    surrogate = surrogate_value(penalty, F)
    reg = reg_value_factored(penalty, F)
    if abs(surrogate - reg) > Tolerances.SURROGATE_EQUALITY * max(1.0, abs(reg)):
        reasons.append(f"surrogate_gap: surrogate {surrogate!r} differs from R(X) = {reg!r}")

    estimate = op.op_norm_bound()
    if estimate.value > 1.0 + 1e-8:
        notes.append(
            f"estimated ||A|| = {estimate.value:.6g} exceeds 1; the restricted-isometry "
            "normalization assumed by the certificate may not hold"
        )

    s = factored_svd(F.B, F.C).s
    retained = s[: numerical_rank(s, Tolerances.RANK_REL)]
    rank_exact = bool(np.all(retained > math.sqrt(mu)))

    result = report.model_copy(
        update={
            "status": "not_certified" if reasons else "certified",
            "reasons": reasons,
            "notes": notes,
            "op_norm": estimate.value,
            "rank_objective_exact": rank_exact,
        }
    )
    logger.info(
        "Certificate computed",
        status=result.status,
        rank=result.rank,
        k=result.k,
        delta=delta,
        violations=len(reasons),
    )
    return result
