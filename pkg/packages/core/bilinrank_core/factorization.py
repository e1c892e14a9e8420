"""
Regularizer, bilinear surrogate and balanced factorizations.

For a penalty f and X with singular values sigma_i:

    R(X)        = sum_i f(sigma_i(X))
    R~(B, C)    = sum_i f((||B_i||^2 + ||C_i||^2) / 2)      (columns B_i, C_i)

R~(B, C) >= R(B C^T) for every factorization, with equality when the factors
are balanced: B = U sqrt(S), C = V sqrt(S) from the SVD of the product.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np
from bilinrank_common import (
    DimensionError,
    NumericalError,
    RankOverflowError,
    Tolerances,
    ValidationError,
    get_logger,
)
from bilinrank_schema import Penalty

from .penalties import evaluate, scalar_prox

logger = get_logger("core.factorization")


@dataclass(frozen=True)
class FactorPair:
    """
    Factors of X = B C^T.

    Attributes:
        B: m x k
        C: n x k
    """

    B: np.ndarray
    C: np.ndarray

    def __post_init__(self) -> None:
        B = np.asarray(self.B, dtype=float)
        C = np.asarray(self.C, dtype=float)
        if B.ndim != 2 or C.ndim != 2:
            raise DimensionError("factors must be matrices", expected="2-D", got=(B.ndim, C.ndim))
        if B.shape[1] != C.shape[1]:
            raise DimensionError(
                "B and C must have the same number of columns",
                expected=B.shape[1],
                got=C.shape[1],
            )
        if B.shape[1] < 1:
            raise ValidationError("factors need at least one column")
        if not (np.all(np.isfinite(B)) and np.all(np.isfinite(C))):
            raise NumericalError("factors contain non-finite entries")
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)

    @property
    def k(self) -> int:
        return int(self.B.shape[1])

    @property
    def shape(self) -> Tuple[int, int]:
        return (int(self.B.shape[0]), int(self.C.shape[0]))

    def product(self) -> np.ndarray:
        return self.B @ self.C.T

    def column_scales(self) -> np.ndarray:
        """(||B_i||^2 + ||C_i||^2) / 2 per column."""
        return 0.5 * (np.sum(self.B**2, axis=0) + np.sum(self.C**2, axis=0))


@dataclass(frozen=True)
class SvdTriple:
    """Thin SVD X = U diag(s) V^T with s descending."""

    U: np.ndarray
    s: np.ndarray
    V: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.U * self.s) @ self.V.T


def svd_triple(X: np.ndarray) -> SvdTriple:
    """
    Thin SVD of X.

    Raises:
        NumericalError: If the SVD does not converge or X is not finite
    """
    X = np.asarray(X, dtype=float)
    if not np.all(np.isfinite(X)):
        raise NumericalError("cannot take the SVD of a matrix with non-finite entries")
    try:
        U, s, Vt = np.linalg.svd(X, full_matrices=False)
    except np.linalg.LinAlgError as e:
        raise NumericalError(
            f"SVD failed for a {X.shape[0]}x{X.shape[1]} matrix with norm "
            f"{np.linalg.norm(X):.6e}: {e}"
        ) from e
    return SvdTriple(U, s, Vt.T)


def singular_values(X: np.ndarray) -> np.ndarray:
    """Singular values of X, descending."""
    X = np.asarray(X, dtype=float)
    if not np.all(np.isfinite(X)):
        raise NumericalError("cannot take the SVD of a matrix with non-finite entries")
    try:
        return np.linalg.svd(X, compute_uv=False)
    except np.linalg.LinAlgError as e:
        raise NumericalError(
            f"SVD failed for a matrix with norm {np.linalg.norm(X):.6e}: {e}"
        ) from e


def factored_svd(B: np.ndarray, C: np.ndarray) -> SvdTriple:
    """
    Thin SVD of B C^T without forming the m x n product.

    QR of both factors reduces the problem to the SVD of a small core
    R_B R_C^T.
    """
    Qb, Rb = np.linalg.qr(np.asarray(B, dtype=float))
    Qc, Rc = np.linalg.qr(np.asarray(C, dtype=float))
    core = svd_triple(Rb @ Rc.T)
    return SvdTriple(Qb @ core.U, core.s, Qc @ core.V)


def numerical_rank(s: np.ndarray, rel: float = Tolerances.RANK_REL) -> int:
    """Number of singular values above rel * sigma_1."""
    s = np.asarray(s, dtype=float)
    if s.size == 0 or s[0] <= 0.0:
        return 0
    return int(np.count_nonzero(s > rel * s[0]))


def matrix_rank(X: np.ndarray, rel: float = Tolerances.RANK_REL) -> int:
    return numerical_rank(singular_values(X), rel)


def reg_value(p: Penalty, X: np.ndarray) -> float:
    """R(X) = sum of f over all min(m, n) singular values."""
    return float(np.sum(evaluate(p, singular_values(X))))


def reg_value_factored(p: Penalty, F: FactorPair) -> float:
    """R(B C^T) computed from the factors."""
    return float(np.sum(evaluate(p, factored_svd(F.B, F.C).s)))


def surrogate_value(p: Penalty, F: FactorPair) -> float:
    """R~(B, C) = sum_i f((||B_i||^2 + ||C_i||^2) / 2)."""
    return float(np.sum(evaluate(p, F.column_scales())))


def _balanced(svd: SvdTriple, k: int, shape: Tuple[int, int]) -> FactorPair:
    m, n = shape
    r = min(k, svd.s.size)
    root = np.sqrt(svd.s[:r])
    B = np.zeros((m, k))
    C = np.zeros((n, k))
    B[:, :r] = svd.U[:, :r] * root
    C[:, :r] = svd.V[:, :r] * root
    return FactorPair(B, C)


def balanced_factorize(X: np.ndarray, k: int, rel: float = Tolerances.RANK_REL) -> FactorPair:
    """
    B = U sqrt(S), C = V sqrt(S), padded with zero columns to k.

    Raises:
        RankOverflowError: If X has more than k singular values above rel * sigma_1
    """
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    X = np.asarray(X, dtype=float)
    svd = svd_triple(X)
    rank = numerical_rank(svd.s, rel)
    if rank > k:
        raise RankOverflowError(rank, k)
    return _balanced(svd, k, X.shape)


def rebalance(F: FactorPair) -> FactorPair:
    """
    Balanced factors of the same product.

    surrogate_value never increases and equals reg_value of the product
    afterwards.
    """
    return _balanced(factored_svd(F.B, F.C), F.k, F.shape)


def sv_prox(p: Penalty, X0: np.ndarray) -> np.ndarray:
    """
    argmin_X R(X) + ||X - X0||_F^2.

    Applies scalar_prox to each singular value and keeps X0's singular vectors.
    """
    svd = svd_triple(X0)
    return (svd.U * sv_prox_values(p, svd.s)) @ svd.V.T


def sv_prox_values(p: Penalty, s: np.ndarray) -> np.ndarray:
    """Singular values of sv_prox(p, X0) given those of X0."""
    return np.asarray(scalar_prox(p, np.asarray(s, dtype=float)), dtype=float)
