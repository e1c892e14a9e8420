"""
bilinrank Exception Classes

This module defines the exception hierarchy for all bilinrank packages.
All custom exceptions inherit from BilinrankError to enable consistent error handling.

Usage:
    from bilinrank_common.errors import DimensionError, ValidationError

    if X.shape != (op.rows, op.cols):
        raise DimensionError("X does not match operator", expected=(4, 5), got=X.shape)
"""

from typing import Any, List, Optional


class BilinrankError(Exception):
    """
    Base exception for all bilinrank errors.

    Attributes:
        message: Human-readable error message
        code: Error code for programmatic handling
    """

    def __init__(self, message: str, code: str = "INTERNAL_ERROR"):
        self.message = message
        self.code = code
        super().__init__(self.message)

    def to_dict(self) -> dict:
        """
        Serialize error to dictionary for reports and CSV failure rows.

        Returns:
            dict with error details including class name, code, and message
        """
        return {"error": self.__class__.__name__, "code": self.code, "message": self.message}

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(code='{self.code}', message='{self.message}')"


class ValidationError(BilinrankError):
    """
    Raised when input validation fails.

    Use this for:
    - Invalid penalty parameters (non-positive mu, gamma <= 2 for SCAD)
    - Invalid solver or experiment configuration
    - Malformed config files

    Example:
        if mu <= 0:
            raise ValidationError(f"mu must be positive, got {mu}")
    """

    def __init__(self, message: str):
        super().__init__(message, code="VALIDATION_ERROR")


class ConfigParseError(ValidationError):
    """
    Raised when a penalty string or key=value config file cannot be parsed.

    Attributes:
        key: The offending key (or token) in the input
    """

    def __init__(self, message: str, key: Optional[str] = None):
        self.key = key
        super().__init__(message)
        self.code = "CONFIG_PARSE_ERROR"

    def to_dict(self) -> dict:
        result = super().to_dict()
        result["key"] = self.key
        return result


class DomainError(ValidationError):
    """
    Raised when a numeric argument lies outside the domain of an operation.

    Example:
        if x < 0:
            raise DomainError(f"penalty argument must be nonnegative, got {x}")
    """

    def __init__(self, message: str):
        super().__init__(message)
        self.code = "DOMAIN_ERROR"


class DimensionError(BilinrankError):
    """
    Raised when matrix or vector dimensions do not match an operator or factor pair.

    Attributes:
        expected: Expected shape or length
        got: Actual shape or length
    """

    def __init__(self, message: str, expected: Any = None, got: Any = None):
        self.expected = expected
        self.got = got
        super().__init__(message, code="DIMENSION_MISMATCH")

    def to_dict(self) -> dict:
        result = super().to_dict()
        result["expected"] = str(self.expected)
        result["got"] = str(self.got)
        return result


class NumericalError(BilinrankError):
    """
    Raised when a numerical routine fails.

    Use this for:
    - SVD that does not converge
    - Non-finite objective values
    """

    def __init__(self, message: str):
        super().__init__(message, code="NUMERICAL_ERROR")


class SingularSystemError(NumericalError):
    """
    Raised when a normal-equation system cannot be solved.

    Attributes:
        column: Index of the deficient unknown (C row / block) if known
    """

    def __init__(self, message: str, column: Optional[int] = None):
        self.column = column
        super().__init__(message)
        self.code = "SINGULAR_SYSTEM"

    def to_dict(self) -> dict:
        result = super().to_dict()
        result["column"] = self.column
        return result


class DivergenceError(NumericalError):
    """
    Raised when an iterative solver diverges.

    Attributes:
        trace: Objective values recorded before the abort
    """

    def __init__(self, message: str, trace: Optional[List[float]] = None):
        self.trace = trace if trace is not None else []
        super().__init__(message)
        self.code = "DIVERGENCE"

    def to_dict(self) -> dict:
        result = super().to_dict()
        result["trace"] = list(self.trace)
        return result


class RankOverflowError(BilinrankError):
    """
    Raised when a matrix has more numerically nonzero singular values than columns allowed.

    Attributes:
        rank: Numerical rank found
        k: Number of columns available
    """

    def __init__(self, rank: int, k: int):
        self.rank = rank
        self.k = k
        super().__init__(
            f"Matrix has numerical rank {rank}, which exceeds the {k} available columns",
            code="RANK_OVERFLOW",
        )

    def to_dict(self) -> dict:
        result = super().to_dict()
        result["rank"] = self.rank
        result["k"] = self.k
        return result


class DegenerateInstanceError(BilinrankError):
    """
    Raised when a generated problem instance is ill-posed.

    Use this for:
    - Masks with empty rows or columns in strict mode
    - Unreachable missing-data fractions
    - Degenerate synthetic scenes after bounded retries
    """

    def __init__(self, message: str):
        super().__init__(message, code="DEGENERATE_INSTANCE")
