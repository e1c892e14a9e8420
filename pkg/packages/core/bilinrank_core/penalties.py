"""
Concave singular-value penalties.

Every penalty f is concave and non-decreasing on [0, inf) with f(0) = 0. The
regularizer of a matrix is R(X) = sum_i f(sigma_i(X)).

Formulas (x >= 0):

    fmu(mu)             mu - max(sqrt(mu) - x, 0)^2
    nuclear(mu)         mu * x
    rank(mu)            mu * [x > 0]
    mcp(lam, gamma)     2 lam x - x^2 / gamma on [0, gamma lam], gamma lam^2 beyond
    scad(lam, gamma)    lam x on [0, lam]
                        (2 gamma lam x - x^2 - lam^2) / (2 (gamma - 1)) on (lam, gamma lam]
                        lam^2 (gamma + 1) / 2 beyond
    log(lam, gamma)     lam log(1 + gamma x) / log(1 + gamma)
    etp(lam, gamma)     lam (1 - exp(-gamma x)) / (1 - exp(-gamma))
    geman(lam, gamma)   lam x / (x + gamma)
    schatten(lam, q)    lam x^q

The mcp scaling is twice the textbook one, so that mcp(sqrt(mu), 1) and
fmu(mu) are the same function.

Usage:
    from bilinrank_core.penalties import evaluate, derivative, scalar_prox

    p = Penalty.fmu(4.0)
    evaluate(p, 1.0)     # 3.0
    scalar_prox(p, 3.0)  # 3.0 (kept: above the threshold sqrt(mu) = 2)
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from bilinrank_common import DomainError, PenaltyGrid, ValidationError, get_logger
from bilinrank_schema import Penalty, PenaltyKind
from scipy.optimize import brentq

logger = get_logger("core.penalties")

ArrayLike = Union[float, np.ndarray]
ScalarFunction = Callable[[np.ndarray], np.ndarray]


def _as_nonnegative(x: ArrayLike) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise DomainError(f"penalty argument must be nonnegative, got min {np.nanmin(arr)!r}")
    return arr


def _result(arr: np.ndarray, like: ArrayLike) -> ArrayLike:
    return float(arr) if np.ndim(like) == 0 else arr


# =============================================================================
# VALUES AND DERIVATIVES
# =============================================================================


def _values(p: Penalty, x: np.ndarray) -> np.ndarray:
    kind = p.kind
    if kind == PenaltyKind.FMU:
        return p.mu - np.maximum(np.sqrt(p.mu) - x, 0.0) ** 2
    if kind == PenaltyKind.NUCLEAR:
        return p.mu * x
    if kind == PenaltyKind.RANK:
        return np.where(x > 0, p.mu, 0.0)
    lam, gamma = p.lam, p.gamma
    if kind == PenaltyKind.MCP:
        return np.where(x <= gamma * lam, 2 * lam * x - x * x / gamma, gamma * lam * lam)
    if kind == PenaltyKind.SCAD:
        middle = (2 * gamma * lam * x - x * x - lam * lam) / (2 * (gamma - 1))
        tail = lam * lam * (gamma + 1) / 2
        return np.where(x <= lam, lam * x, np.where(x <= gamma * lam, middle, tail))
    if kind == PenaltyKind.LOG:
        return lam * np.log1p(gamma * x) / math.log1p(gamma)
    if kind == PenaltyKind.ETP:
        return lam * -np.expm1(-gamma * x) / -math.expm1(-gamma)
    if kind == PenaltyKind.GEMAN:
        return lam * x / (x + gamma)
    if kind == PenaltyKind.SCHATTEN:
        return lam * x**p.q
    raise ValidationError(f"Unsupported penalty kind '{kind}'")


def _derivatives(p: Penalty, x: np.ndarray) -> np.ndarray:
    kind = p.kind
    if kind == PenaltyKind.FMU:
        return 2.0 * np.maximum(np.sqrt(p.mu) - x, 0.0)
    if kind == PenaltyKind.NUCLEAR:
        return np.full_like(x, p.mu)
    if kind == PenaltyKind.RANK:
        return np.where(x > 0, 0.0, np.inf)
    lam, gamma = p.lam, p.gamma
    if kind == PenaltyKind.MCP:
        return 2.0 * np.maximum(lam - x / gamma, 0.0)
    if kind == PenaltyKind.SCAD:
        middle = np.maximum(gamma * lam - x, 0.0) / (gamma - 1)
        return np.where(x <= lam, lam, middle)
    if kind == PenaltyKind.LOG:
        return lam * gamma / ((1 + gamma * x) * math.log1p(gamma))
    if kind == PenaltyKind.ETP:
        return lam * gamma * np.exp(-gamma * x) / -math.expm1(-gamma)
    if kind == PenaltyKind.GEMAN:
        return lam * gamma / (x + gamma) ** 2
    if kind == PenaltyKind.SCHATTEN:
        with np.errstate(divide="ignore"):
            return np.where(x > 0, lam * p.q * x ** (p.q - 1), np.inf if p.q < 1 else lam)
    raise ValidationError(f"Unsupported penalty kind '{kind}'")


def evaluate(p: Penalty, x: ArrayLike) -> ArrayLike:
    """
    f(x) for a scalar or elementwise for an array.

    Raises:
        DomainError: If any x is negative
    """
    arr = _as_nonnegative(x)
    return _result(_values(p, arr), x)


def derivative(p: Penalty, x: ArrayLike) -> ArrayLike:
    """
    f'(x), non-increasing in x.

    At kinks the right-hand limit is returned (fmu at sqrt(mu) gives 0). rank
    and schatten (q < 1) are infinite at 0.

    Raises:
        DomainError: If any x is negative
    """
    arr = _as_nonnegative(x)
    return _result(_derivatives(p, arr), x)


# =============================================================================
# SCALAR PROXIMAL MAP
# =============================================================================


def _prox_objective(p: Penalty, x: np.ndarray, y: float) -> np.ndarray:
    return _values(p, x) + (x - y) ** 2


def _best_candidate(p: Penalty, candidates: np.ndarray, y: float) -> float:
    """Minimizer among candidates; exact ties go to the larger argument."""
    values = _prox_objective(p, candidates, y)
    best = values.min()
    return float(candidates[values == best].max())


def _prox_mcp(p: Penalty, y: float) -> float:
    lam, gamma = p.lam, p.gamma
    knot = gamma * lam
    candidates = [0.0, knot, max(y, knot)]
    if gamma > 1:
        candidates.append(min(max(gamma * (y - lam) / (gamma - 1), 0.0), knot))
    return _best_candidate(p, np.array(candidates), y)


def _prox_scad(p: Penalty, y: float) -> float:
    lam, gamma = p.lam, p.gamma
    knot = gamma * lam
    candidates = [
        0.0,
        lam,
        knot,
        min(max(y - lam / 2, 0.0), lam),
        min(max((2 * (gamma - 1) * y - knot) / (2 * gamma - 3), lam), knot),
        max(y, knot),
    ]
    return _best_candidate(p, np.array(candidates), y)


def _prox_numeric(p: Penalty, y: float) -> float:
    """
    Minimize f(x) + (x - y)^2 over [0, y] for smooth penalties.

    Sign changes of g'(x) = f'(x) + 2(x - y) are bracketed on a uniform grid
    and refined with Brent's method; the endpoints are always candidates.
    """
    if y == 0.0:
        return 0.0

    def slope(t: float) -> float:
        return float(_derivatives(p, np.array(t))) + 2.0 * (t - y)

    grid = np.linspace(0.0, y, PenaltyGrid.PROX_BRACKETS)
    slopes = _derivatives(p, grid) + 2.0 * (grid - y)
    candidates = [0.0, y]
    candidates.extend(grid[slopes == 0.0].tolist())
    for i in range(len(grid) - 1):
        lo, hi = grid[i], grid[i + 1]
        s_lo, s_hi = slopes[i], slopes[i + 1]
        if not np.isfinite(s_lo):
            lo = hi * 1e-9
            s_lo = slope(lo)
        if s_lo * s_hi < 0:
            candidates.append(brentq(slope, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps))
    return _best_candidate(p, np.array(candidates), y)


def _prox_one(p: Penalty, y: float) -> float:
    kind = p.kind
    if kind == PenaltyKind.FMU:
        # hard threshold; y == sqrt(mu) is a tie and keeps y
        return y if y >= math.sqrt(p.mu) else 0.0
    if kind == PenaltyKind.RANK:
        return y if y >= math.sqrt(p.mu) else 0.0
    if kind == PenaltyKind.NUCLEAR:
        return max(y - p.mu / 2.0, 0.0)
    if kind == PenaltyKind.MCP:
        return _prox_mcp(p, y)
    if kind == PenaltyKind.SCAD:
        return _prox_scad(p, y)
    return _prox_numeric(p, y)


def scalar_prox(p: Penalty, y: ArrayLike) -> ArrayLike:
    """
    argmin over x >= 0 of f(x) + (x - y)^2, for a scalar or elementwise.

    fmu is hard thresholding at sqrt(mu), nuclear is soft thresholding by
    mu / 2. When two arguments attain the minimum the larger one is returned.

    Raises:
        DomainError: If any y is negative
    """
    arr = _as_nonnegative(y)
    out = np.array([_prox_one(p, float(v)) for v in arr.ravel()]).reshape(arr.shape)
    return _result(out, y)


# =============================================================================
# SCALING AND VALIDATION
# =============================================================================


def scaled(p: Penalty, c: float) -> Penalty:
    """
    The penalty c * f, expressed in the same family.

    fmu(mu) scaled by c is mcp(c sqrt(mu), 1 / c).

    Raises:
        ValidationError: If c <= 0 or the kind is scad (c * scad is not a scad)
    """
    if not c > 0:
        raise ValidationError(f"scale must be positive, got {c}")
    if c == 1.0:
        return p
    kind = p.kind
    if kind == PenaltyKind.FMU:
        return Penalty.mcp(c * math.sqrt(p.mu), 1.0 / c)
    if kind in (PenaltyKind.NUCLEAR, PenaltyKind.RANK):
        return p.with_parameter("mu", c * p.mu)
    if kind == PenaltyKind.MCP:
        return Penalty.mcp(c * p.lam, p.gamma / c)
    if kind == PenaltyKind.SCAD:
        raise ValidationError("scad cannot be rescaled within its family")
    return p.with_parameter("lambda", c * p.lam)


def characteristic_scale(p: Penalty) -> float:
    """Argument scale at which f changes character (threshold or knee)."""
    kind = p.kind
    if kind in (PenaltyKind.FMU, PenaltyKind.RANK):
        return math.sqrt(p.mu)
    if kind == PenaltyKind.NUCLEAR:
        return p.mu
    if kind in (PenaltyKind.MCP, PenaltyKind.SCAD):
        return p.gamma * p.lam
    if kind == PenaltyKind.GEMAN:
        return max(p.lam, p.gamma)
    return p.lam


def threshold(p: Penalty) -> float:
    """Largest y with scalar_prox(p, y) == 0 for the thresholding kinds, else the scale."""
    kind = p.kind
    if kind in (PenaltyKind.FMU, PenaltyKind.RANK):
        return math.sqrt(p.mu)
    if kind == PenaltyKind.NUCLEAR:
        return p.mu / 2.0
    return characteristic_scale(p)


@dataclass(frozen=True)
class PenaltyCheck:
    """
    Result of validate().

    Attributes:
        ok: True when every hypothesis holds on the grid
        violated: "zero_at_origin", "monotone" or "concave"
        at: Grid point where the first violation was found
        message: Human-readable description
    """

    ok: bool
    violated: Optional[str] = None
    at: Optional[float] = None
    message: str = ""


def validate(
    p: Union[Penalty, ScalarFunction],
    x_max: Optional[float] = None,
    points: int = PenaltyGrid.POINTS,
) -> PenaltyCheck:
    """
    Check f(0) = 0, monotonicity and concavity on a uniform grid.

    Args:
        p: A Penalty, or any vectorized callable f (used to test the checker)
        x_max: Grid end; defaults to 10x the characteristic scale (10 for callables)
        points: Number of grid points

    Returns:
        PenaltyCheck naming the first violated property, if any
    """
    if isinstance(p, Penalty):
        f: ScalarFunction = lambda x: _values(p, x)  # noqa: E731
        span = PenaltyGrid.SPAN * characteristic_scale(p) if x_max is None else x_max
    else:
        f = p
        span = PenaltyGrid.SPAN if x_max is None else x_max

    grid = np.linspace(0.0, span, points)
    values = np.asarray(f(grid), dtype=float)

    if abs(values[0]) > PenaltyGrid.TOL_ZERO:
        return PenaltyCheck(False, "zero_at_origin", 0.0, f"f(0) = {values[0]!r}, expected 0")

    drops = np.flatnonzero(np.diff(values) < -PenaltyGrid.TOL_SHAPE)
    if drops.size:
        i = int(drops[0])
        return PenaltyCheck(
            False,
            "monotone",
            float(grid[i + 1]),
            f"f decreases from {values[i]!r} to {values[i + 1]!r} at x = {grid[i + 1]!r}",
        )

    midpoint_gap = values[1:-1] - (values[:-2] + values[2:]) / 2.0
    bends = np.flatnonzero(midpoint_gap < -PenaltyGrid.TOL_SHAPE)
    if bends.size:
        i = int(bends[0]) + 1
        return PenaltyCheck(
            False,
            "concave",
            float(grid[i]),
            f"midpoint test fails at x = {grid[i]!r} (gap {midpoint_gap[i - 1]!r})",
        )

    return PenaltyCheck(True, message="ok")


def minimal_suppressing_weight(p: Penalty, sigma: float) -> float:
    """
    Smallest weight (mu, or lambda for two-parameter kinds) with scalar_prox(sigma) == 0.

    Found by bisection on the weight, keeping the upper end of the bracket,
    so the returned weight always zeroes sigma.
    """
    if sigma < 0:
        raise DomainError(f"sigma must be nonnegative, got {sigma}")
    name = "mu" if p.kind in (PenaltyKind.FMU, PenaltyKind.NUCLEAR, PenaltyKind.RANK) else "lambda"

    def suppresses(w: float) -> bool:
        return _prox_one(p.with_parameter(name, w), sigma) == 0.0

    if sigma == 0.0:
        return float(np.finfo(float).tiny)

    hi = max(p.parameters()[name], 1e-12)
    for _ in range(2000):
        if suppresses(hi):
            break
        hi *= 2.0
    else:
        raise ValidationError(f"No weight of {p.kind.value} suppresses sigma = {sigma}")

    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if suppresses(mid):
            hi = mid
        else:
            lo = mid
    logger.debug("Suppressing weight found", kind=p.kind.value, sigma=sigma, weight=hi)
    return hi
