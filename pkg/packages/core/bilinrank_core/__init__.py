"""
bilinrank Core Package

Numerics for regularized low-rank recovery:

- penalties: concave singular-value penalties, derivatives and scalar proxes
- operators: masked, pOSE and non-rigid SfM measurement operators
- factorization: regularizer, bilinear surrogate, balanced factorizations
- varpro: the iteratively reweighted VarPro solver
- certificate: global-optimality test for rank-deficient solutions
- admm: ADMM baselines for the same objective

Usage:
    from bilinrank_core import MaskedOp, solve
    from bilinrank_schema import SolverConfig

    op = MaskedOp(W)
    report = solve(SolverConfig(penalty="fmu:mu=512", k=8), op, op.observe(M))
"""

from .admm import admm_solve
from .certificate import certificate_mu, certify, check_optimality, compute_Z, forbidden_interval
from .factorization import (
    FactorPair,
    SvdTriple,
    balanced_factorize,
    factored_svd,
    matrix_rank,
    numerical_rank,
    rebalance,
    reg_value,
    reg_value_factored,
    singular_values,
    surrogate_value,
    sv_prox,
    sv_prox_values,
    svd_triple,
)
from .linalg import BlockPseudoInverse
from .operators import (
    MaskedOp,
    MeasurementOp,
    NrsfmOp,
    OpNormEstimate,
    PoseOp,
    load_nrsfm_cameras_csv,
    load_pose_observations_csv,
    save_nrsfm_cameras_csv,
    save_pose_observations_csv,
    sharp_to_stacked,
    stacked_to_sharp,
)
from .penalties import (
    PenaltyCheck,
    characteristic_scale,
    derivative,
    evaluate,
    minimal_suppressing_weight,
    scalar_prox,
    scaled,
    threshold,
    validate,
)
from .varpro import (
    StepResult,
    c_solve,
    data_gradient,
    data_term,
    init_factors,
    projected_gradient_norm,
    rw2_step,
    solve,
    surrogate_objective,
    true_objective,
    weights,
)

__version__ = "0.1.0"

__all__ = [
    # Penalties
    "evaluate",
    "derivative",
    "scalar_prox",
    "scaled",
    "characteristic_scale",
    "threshold",
    "validate",
    "PenaltyCheck",
    "minimal_suppressing_weight",
    # Operators
    "MeasurementOp",
    "MaskedOp",
    "PoseOp",
    "NrsfmOp",
    "OpNormEstimate",
    "stacked_to_sharp",
    "sharp_to_stacked",
    "load_pose_observations_csv",
    "save_pose_observations_csv",
    "load_nrsfm_cameras_csv",
    "save_nrsfm_cameras_csv",
    # Factorization
    "FactorPair",
    "SvdTriple",
    "svd_triple",
    "factored_svd",
    "singular_values",
    "numerical_rank",
    "matrix_rank",
    "reg_value",
    "reg_value_factored",
    "surrogate_value",
    "balanced_factorize",
    "rebalance",
    "sv_prox",
    "sv_prox_values",
    "BlockPseudoInverse",
    # VarPro
    "init_factors",
    "weights",
    "data_term",
    "data_gradient",
    "true_objective",
    "surrogate_objective",
    "c_solve",
    "rw2_step",
    "StepResult",
    "projected_gradient_norm",
    "solve",
    # Certificate
    "compute_Z",
    "check_optimality",
    "certify",
    "certificate_mu",
    "forbidden_interval",
    # ADMM
    "admm_solve",
]
