"""
Iteratively reweighted VarPro solver.

Minimizes N(X) = R(X) + ||A(X) - b||^2 over X = B C^T. Every outer iteration:

1. weights w_i = f'((||B_i||^2 + ||C_i||^2) / 2) / 2 majorize the surrogate
   R~(B, C) by the quadratic sum_i w_i (||B_i||^2 + ||C_i||^2)
2. one damped Ruhe-Wedin (RW2) step on B with C eliminated in closed form
3. C is re-solved exactly for the new B
4. the candidate is accepted iff N strictly decreases; accepted factors are
   rebalanced through the SVD and the damping shrinks, otherwise it grows

Vectorization conventions: vec(B) is row-major (index i * k + l) and vec(C)
is column-major (index l * n + j), so that with A acting on row-major vec(X)

    J_B = A (I_m kron C)        J_C = A (B kron I_n)

The regularization rows sqrt(w_l) B[i, l] and sqrt(w_l) C[j, l] add
diag(w) blocks to the normal matrices.
"""

import math
import time
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
import scipy.sparse as sp
from bilinrank_common import (
    DimensionError,
    DivergenceError,
    NumericalError,
    SingularSystemError,
    SolverDefaults,
    get_logger,
)
from bilinrank_schema import IterationRecord, Penalty, SolveReport, SolverConfig
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .factorization import FactorPair, factored_svd, rebalance
from .linalg import BlockPseudoInverse
from .operators import MeasurementOp, check_rhs
from .penalties import derivative, evaluate

logger = get_logger("core.varpro")


def init_factors(m: int, n: int, k: int, seed: int) -> FactorPair:
    """Standard-normal B (m x k) and C (n x k) from a PCG64 stream."""
    rng = np.random.Generator(np.random.PCG64(seed))
    B = rng.standard_normal((m, k))
    C = rng.standard_normal((n, k))
    return FactorPair(B, C)


def weights(p: Penalty, F: FactorPair) -> np.ndarray:
    """w_i = f'((||B_i||^2 + ||C_i||^2) / 2) / 2, one per column."""
    return 0.5 * np.asarray(derivative(p, F.column_scales()), dtype=float)


def data_term(op: MeasurementOp, b: np.ndarray, X: np.ndarray) -> float:
    r = op.residual(X, b)
    return float(r @ r)


def data_gradient(op: MeasurementOp, b: np.ndarray, F: FactorPair) -> Tuple[np.ndarray, np.ndarray]:
    """Gradient of ||A(B C^T) - b||^2 with respect to B and C."""
    G = 2.0 * op.adjoint(op.residual(F.product(), b))
    return G @ F.C, G.T @ F.B


def true_objective(p: Penalty, op: MeasurementOp, b: np.ndarray, F: FactorPair) -> float:
    """N(B C^T) = R(B C^T) + ||A(B C^T) - b||^2."""
    reg = float(np.sum(evaluate(p, factored_svd(F.B, F.C).s)))
    return reg + data_term(op, b, F.product())


def surrogate_objective(
    p: Penalty,
    op: MeasurementOp,
    b: np.ndarray,
    F: FactorPair,
    w: Optional[np.ndarray] = None,
) -> float:
    """
    sum_i w_i (||B_i||^2 + ||C_i||^2) + ||A(B C^T) - b||^2.

    Args:
        w: Majorization weights; computed from F when omitted
    """
    if w is None:
        w = weights(p, F)
    quad = float(np.sum(w * (np.sum(F.B**2, axis=0) + np.sum(F.C**2, axis=0))))
    return quad + data_term(op, b, F.product())


# =============================================================================
# NORMAL EQUATIONS
# =============================================================================


def _jacobian_b(A: sp.csr_matrix, C: np.ndarray, m: int) -> sp.csr_matrix:
    return (A @ sp.kron(sp.identity(m, format="csr"), sp.csr_matrix(C), format="csr")).tocsr()


def _jacobian_c(A: sp.csr_matrix, B: np.ndarray, n: int) -> sp.csr_matrix:
    return (A @ sp.kron(sp.csr_matrix(B), sp.identity(n, format="csr"), format="csr")).tocsr()


def _c_normal(Jc: sp.csr_matrix, w: np.ndarray, n: int) -> sp.csr_matrix:
    return (Jc.T @ Jc + sp.diags(np.repeat(w, n))).tocsr()


def _solve_c(
    A: sp.csr_matrix, b: np.ndarray, B: np.ndarray, w: np.ndarray, n: int, allow_rank_deficient: bool
) -> np.ndarray:
    k = B.shape[1]
    Jc = _jacobian_c(A, B, n)
    pinv = BlockPseudoInverse.from_sparse(_c_normal(Jc, w, n))
    if pinv.singular and not allow_rank_deficient:
        index = pinv.deficient[0]
        raise SingularSystemError(
            f"normal equations for C are singular; column {index % n} of X is not identified "
            f"(C[{index % n}, {index // n}])",
            column=index % n,
        )
    c = pinv.apply(Jc.T @ b)
    return c.reshape(k, n).T


def c_solve(
    op: MeasurementOp,
    b: np.ndarray,
    B: np.ndarray,
    w: np.ndarray,
    allow_rank_deficient: bool = False,
) -> np.ndarray:
    """
    Exact minimizer over C of sum_i w_i ||C_i||^2 + ||A(B C^T) - b||^2.

    The penalty enters only through the weights w.

    Args:
        allow_rank_deficient: Return the minimum-norm minimizer instead of raising

    Raises:
        SingularSystemError: If the normal matrix is singular (reports the first
            unidentified column of X)
    """
    b = check_rhs(op, b)
    B = np.asarray(B, dtype=float)
    w = np.asarray(w, dtype=float)
    if B.shape[0] != op.rows or w.shape != (B.shape[1],):
        raise DimensionError(
            "B must be rows x k and w of length k", expected=(op.rows, w.size), got=B.shape
        )
    return _solve_c(op.matrix(), b, B, w, op.cols, allow_rank_deficient)


@dataclass
class StepResult:
    """Outcome of one RW2 step."""

    candidate: FactorPair
    grad_norm: float
    weights: np.ndarray


def _rw2(
    p: Penalty,
    A: sp.csr_matrix,
    b: np.ndarray,
    F: FactorPair,
    damping: float,
    gradient_only: bool = False,
) -> Tuple[Optional[FactorPair], float, np.ndarray]:
    m, n = F.shape
    k = F.k
    B, C = F.B, F.C
    w = weights(p, F)
    wB = np.tile(w, m)
    wC = np.repeat(w, n)

    r = A @ (B @ C.T).ravel() - b
    Jb = _jacobian_b(A, C, m)
    Jc = _jacobian_c(A, B, n)
    pinv = BlockPseudoInverse.from_sparse(_c_normal(Jc, w, n))

    D = (Jc.T @ Jb).toarray()
    GD = pinv.apply(D)
    gB = Jb.T @ r + wB * B.ravel()
    gC = Jc.T @ r + wC * C.ravel(order="F")
    g = gB - GD.T @ gC
    grad_norm = float(np.linalg.norm(g))
    if gradient_only or not math.isfinite(grad_norm):
        return None, grad_norm, w

    S = (Jb.T @ Jb).toarray() + np.diag(wB) - D.T @ GD
    S = 0.5 * (S + S.T) + damping * np.eye(m * k)
    try:
        factor = cho_factor(S)
    except LinAlgError as e:
        raise SingularSystemError(f"reduced system is not positive definite at damping {damping:.3e}") from e
    delta = -cho_solve(factor, g)
    B_new = B + delta.reshape(m, k)
    C_new = _solve_c(A, b, B_new, w, n, allow_rank_deficient=True)
    return FactorPair(B_new, C_new), grad_norm, w


def projected_gradient_norm(p: Penalty, op: MeasurementOp, b: np.ndarray, F: FactorPair) -> float:
    """Norm of the reduced (C-eliminated) gradient used by rw2_step."""
    _, grad_norm, _ = _rw2(p, op.matrix(), check_rhs(op, b), F, 1.0, gradient_only=True)
    return grad_norm


def rw2_step(
    p: Penalty, op: MeasurementOp, b: np.ndarray, F: FactorPair, damping: float
) -> StepResult:
    """
    One damped RW2 step from F with weights fixed at F.

    B' = B - (J~^T J~ + damping I)^{-1} J~^T r with J~ = (I - J_C J_C^+) J_B, then
    C' minimizes the weighted least-squares problem for B'.

    Raises:
        SingularSystemError: If the damped reduced system cannot be factorized
    """
    candidate, grad_norm, w = _rw2(p, op.matrix(), check_rhs(op, b), F, damping)
    if candidate is None:
        raise NumericalError(f"non-finite gradient (norm {grad_norm})")
    return StepResult(candidate, grad_norm, w)


# =============================================================================
# SOLVER
# =============================================================================


def _check_init(op: MeasurementOp, F: FactorPair, k: int) -> None:
    if F.shape != op.shape:
        raise DimensionError("initial factors do not match the operator", expected=op.shape, got=F.shape)
    if F.k != k:
        raise DimensionError("initial factors have the wrong number of columns", expected=k, got=F.k)


def solve(
    cfg: SolverConfig,
    op: MeasurementOp,
    b: np.ndarray,
    init: Optional[FactorPair] = None,
) -> SolveReport:
    """
    Run the reweighted VarPro iteration.

    Args:
        cfg: Solver configuration
        op: Measurement operator
        b: Measurements
        init: Initial factors; standard normal from cfg.seed when omitted

    Returns:
        SolveReport with the balanced final factors and the per-iteration trace

    Raises:
        DimensionError: If b or init do not match op
        NumericalError: If the initial objective is not finite
        DivergenceError: If the gradient becomes non-finite
    """
    p = cfg.penalty
    b = check_rhs(op, b)
    m, n = op.shape
    F = init if init is not None else init_factors(m, n, cfg.k, cfg.seed)
    _check_init(op, F, cfg.k)
    A = op.matrix()

    F = rebalance(F)
    objective = true_objective(p, op, b, F)
    if not math.isfinite(objective):
        raise NumericalError(f"initial objective is not finite ({objective})")
    initial_objective = objective

    log = logger.with_context(penalty=str(p), k=cfg.k, seed=cfg.seed)
    log.info("VarPro solve started", rows=m, cols=n, measurements=op.size, objective=objective)

    damping = cfg.lambda0
    trace: List[IterationRecord] = []
    termination = "max_iters"
    small_steps = 0
    start = time.perf_counter()

    for iteration in range(1, cfg.max_iters + 1):
        if cfg.budget_seconds is not None and time.perf_counter() - start > cfg.budget_seconds:
            termination = "time_budget"
            break

        try:
            candidate, grad_norm, w = _rw2(p, A, b, F, damping)
        except NumericalError:
            # singular reduced system or a non-finite candidate: treated as a rejected step
            candidate, grad_norm, w = None, float("nan"), weights(p, F)
        else:
            if candidate is None:
                raise DivergenceError(
                    f"gradient became non-finite at iteration {iteration}",
                    trace=[r.objective for r in trace],
                )
            if grad_norm <= cfg.tol_grad:
                termination = "converged_grad"
                break

        surrogate = None
        accepted = False
        if candidate is not None:
            surrogate = surrogate_objective(p, op, b, candidate, w)
            balanced = rebalance(candidate)
            cand_objective = true_objective(p, op, b, balanced)
            accepted = math.isfinite(cand_objective) and cand_objective < objective

        used_damping = damping
        if accepted:
            decrease = (objective - cand_objective) / max(abs(objective), np.finfo(float).tiny)
            F, objective = balanced, cand_objective
            damping *= cfg.lambda_down
            small_steps = small_steps + 1 if decrease < cfg.tol_rel_obj else 0
        else:
            damping *= cfg.lambda_up

        trace.append(
            IterationRecord(
                iteration=iteration,
                objective=objective,
                surrogate=surrogate,
                damping=used_damping,
                accepted=accepted,
                grad_norm=grad_norm if math.isfinite(grad_norm) else None,
            )
        )
        log.debug(
            "VarPro iteration",
            iteration=iteration,
            objective=objective,
            damping=used_damping,
            accepted=accepted,
            grad_norm=grad_norm,
        )

        if small_steps >= SolverDefaults.CONSECUTIVE_SMALL_STEPS:
            termination = "converged_obj"
            break
        if damping > SolverDefaults.LAMBDA_MAX:
            # no representable decrease left
            log.info("Damping ceiling reached", iteration=iteration, damping=damping)
            termination = "converged_obj"
            break

    seconds = time.perf_counter() - start
    log.info(
        "VarPro solve finished",
        termination=termination,
        iterations=len(trace),
        objective=objective,
        seconds=round(seconds, 6),
    )
    return SolveReport(
        solver="varpro",
        penalty=p,
        X=F.product(),
        B=F.B,
        C=F.C,
        trace=trace,
        termination=termination,
        iterations=len(trace),
        initial_objective=initial_objective,
        final_objective=objective,
        seconds=seconds,
        seed=cfg.seed,
    )
