"""
bilinrank Validation Utilities

Reusable argument checks used across bilinrank packages.
All validation functions raise ValidationError (or a subclass) on invalid input.

Usage:
    from bilinrank_common.validation import validate_positive, validate_fraction

    validate_positive("mu", mu)
    validate_fraction("missing_frac", frac, allow_one=False)
"""

import math
from typing import Tuple

import numpy as np

from .errors import DimensionError, DomainError, NumericalError, ValidationError


def validate_positive(name: str, value: float) -> float:
    """
    Check that a scalar parameter is finite and strictly positive.

    Raises:
        ValidationError: If value <= 0 or not finite

    Examples:
        >>> validate_positive("mu", 4.0)
        4.0
    """
    if not isinstance(value, (int, float)) or not math.isfinite(value) or value <= 0:
        raise ValidationError(f"{name} must be a positive finite number, got {value!r}")
    return float(value)


def validate_nonnegative(name: str, value: float) -> float:
    """Check that a scalar is finite and >= 0 (DomainError otherwise)."""
    if not isinstance(value, (int, float)) or not math.isfinite(value) or value < 0:
        raise DomainError(f"{name} must be nonnegative, got {value!r}")
    return float(value)


def validate_fraction(name: str, value: float, allow_one: bool = False) -> float:
    """
    Check that value lies in [0, 1) (or [0, 1] when allow_one).

    Raises:
        DomainError: If the value is out of range
    """
    upper_ok = value <= 1.0 if allow_one else value < 1.0
    if not math.isfinite(value) or value < 0.0 or not upper_ok:
        interval = "[0, 1]" if allow_one else "[0, 1)"
        raise DomainError(f"{name} must lie in {interval}, got {value!r}")
    return float(value)


def validate_positive_int(name: str, value: int, minimum: int = 1) -> int:
    """Check an integer size parameter against a lower bound."""
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < minimum:
        raise ValidationError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def validate_matrix(name: str, X: np.ndarray, shape: Tuple[int, int] | None = None) -> np.ndarray:
    """
    Check that X is a finite 2-D float array, optionally with a given shape.

    Returns:
        X as a float64 ndarray

    Raises:
        DimensionError: If X is not 2-D or its shape differs from `shape`
        NumericalError: If X contains NaN or Inf
    """
    arr = np.asarray(X, dtype=float)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be a matrix", expected="2-D", got=arr.shape)
    if shape is not None and arr.shape != tuple(shape):
        raise DimensionError(f"{name} has the wrong shape", expected=tuple(shape), got=arr.shape)
    if not np.all(np.isfinite(arr)):
        raise NumericalError(f"{name} contains non-finite entries")
    return arr


def validate_vector(name: str, y: np.ndarray, length: int | None = None) -> np.ndarray:
    """
    Check that y is a finite 1-D float array, optionally of a given length.

    Raises:
        DimensionError: If y is not 1-D or has the wrong length
        NumericalError: If y contains NaN or Inf
    """
    arr = np.asarray(y, dtype=float)
    if arr.ndim != 1:
        raise DimensionError(f"{name} must be a vector", expected="1-D", got=arr.shape)
    if length is not None and arr.shape[0] != length:
        raise DimensionError(f"{name} has the wrong length", expected=length, got=arr.shape[0])
    if not np.all(np.isfinite(arr)):
        raise NumericalError(f"{name} contains non-finite entries")
    return arr
