"""
ADMM baseline for min R(Y) + ||A(X) - b||^2 subject to X = Y.

Scaled form with multiplier L and coupling rho ||X - Y + L||^2:

    X <- argmin ||A(X) - b||^2 + rho ||X - (Y - L)||^2
    Y <- argmin R(Y) + rho ||Y - (X + L)||^2 = sv_prox(rho^-1 f, X + L)
    L <- L + X - Y

The Y-update is the singular-value prox of the penalty scaled by 1 / rho; for
fmu that is mcp(sqrt(mu) / rho, rho), which is hard thresholding at sqrt(mu)
when rho = 1. The reported solution is Y.
"""

import math
import time
from typing import Callable, List

import numpy as np
import scipy.sparse as sp
from bilinrank_common import AdmmDefaults, DivergenceError, get_logger
from bilinrank_schema import AdmmConfig, IterationRecord, SolveReport
from scipy.sparse.linalg import splu

from .factorization import sv_prox_values, svd_triple
from .operators import MaskedOp, MeasurementOp, check_rhs
from .penalties import evaluate, scaled

logger = get_logger("core.admm")

XUpdate = Callable[[np.ndarray], np.ndarray]


def _x_update(op: MeasurementOp, b: np.ndarray, rho: float) -> XUpdate:
    """Solver for (A*A + rho I) x = A*b + rho v, factorized once."""
    atb = op.adjoint(b)
    if isinstance(op, MaskedOp):
        denom = op.mask.astype(float) + rho
        return lambda V: (atb + rho * V) / denom

    A = op.matrix()
    system = (A.T @ A + rho * sp.identity(A.shape[1], format="csc")).tocsc()
    lu = splu(system)
    shape = op.shape
    return lambda V: lu.solve((atb + rho * V).ravel()).reshape(shape)


def admm_solve(cfg: AdmmConfig, op: MeasurementOp, b: np.ndarray) -> SolveReport:
    """
    Run ADMM from X = Y = L = 0.

    Stops when ||X - Y|| <= tol_primal max(||X||, ||Y||) and
    rho ||Y - Y_prev|| <= tol_dual max(||X||, ||Y||), at max_iters or when the
    time budget runs out. Increases of the objective are counted, not fatal.

    Raises:
        DivergenceError: If the objective exceeds 1e6 times max(initial, 1)
    """
    p = cfg.penalty
    rho = cfg.rho
    b = check_rhs(op, b)
    shape = op.shape
    prox_penalty = scaled(p, 1.0 / rho)
    x_update = _x_update(op, b, rho)

    X = np.zeros(shape)
    Y = np.zeros(shape)
    L = np.zeros(shape)
    initial_objective = float(b @ b)
    objective = initial_objective
    ceiling = AdmmDefaults.DIVERGENCE_FACTOR * max(initial_objective, 1.0)

    log = logger.with_context(penalty=str(p), rho=rho)
    log.info("ADMM solve started", rows=shape[0], cols=shape[1], measurements=op.size)

    trace: List[IterationRecord] = []
    termination = "max_iters"
    non_monotone = 0
    start = time.perf_counter()

    for iteration in range(1, cfg.max_iters + 1):
        if cfg.budget_seconds is not None and time.perf_counter() - start > cfg.budget_seconds:
            termination = "time_budget"
            break

        X = x_update(Y - L)
        svd = svd_triple(X + L)
        s = sv_prox_values(prox_penalty, svd.s)
        Y_prev = Y
        Y = (svd.U * s) @ svd.V.T
        L = L + X - Y

        r = op.residual(Y, b)
        # prox values are the singular values of Y
        new_objective = float(np.sum(evaluate(p, s))) + float(r @ r)
        if new_objective > objective:
            non_monotone += 1
        objective = new_objective

        primal = float(np.linalg.norm(X - Y))
        dual = rho * float(np.linalg.norm(Y - Y_prev))
        trace.append(
            IterationRecord(
                iteration=iteration,
                objective=objective,
                damping=rho,
                accepted=True,
                grad_norm=primal,
            )
        )
        log.debug("ADMM iteration", iteration=iteration, objective=objective, primal=primal, dual=dual)

        if not math.isfinite(objective) or objective > ceiling:
            raise DivergenceError(
                f"ADMM diverged at iteration {iteration}: objective {objective!r} "
                f"exceeds {ceiling!r}",
                trace=[record.objective for record in trace],
            )

        scale = max(float(np.linalg.norm(X)), float(np.linalg.norm(Y)))
        if primal <= cfg.tol_primal * scale and dual <= cfg.tol_dual * scale:
            termination = "converged_residuals"
            break

    seconds = time.perf_counter() - start
    log.info(
        "ADMM solve finished",
        termination=termination,
        iterations=len(trace),
        objective=objective,
        non_monotone_steps=non_monotone,
        seconds=round(seconds, 6),
    )
    return SolveReport(
        solver="admm",
        penalty=p,
        X=Y,
        trace=trace,
        termination=termination,
        iterations=len(trace),
        initial_objective=initial_objective,
        final_objective=objective,
        seconds=seconds,
        non_monotone_steps=non_monotone,
        seed=cfg.seed,
    )
