"""
Tests for bilinrank-common errors, constants and validation helpers
"""

import numpy as np
import pytest

from bilinrank_common import (
    BilinrankError,
    ConfigParseError,
    DegenerateInstanceError,
    DimensionError,
    DivergenceError,
    DomainError,
    NumericalError,
    RankOverflowError,
    SingularSystemError,
    SolverDefaults,
    SupportedValues,
    Tolerances,
    ValidationError,
    validate_fraction,
    validate_matrix,
    validate_nonnegative,
    validate_positive,
    validate_positive_int,
    validate_vector,
)


class TestErrors:
    """Test error classes"""

    def test_validation_error(self):
        error = ValidationError("Test error")
        assert error.code == "VALIDATION_ERROR"
        assert error.message == "Test error"
        assert "Test error" in str(error)

    def test_error_to_dict(self):
        error = ValidationError("Test")
        error_dict = error.to_dict()
        assert error_dict["error"] == "ValidationError"
        assert error_dict["code"] == "VALIDATION_ERROR"
        assert error_dict["message"] == "Test"

    def test_hierarchy(self):
        """Subclasses are catchable through their parents"""
        assert issubclass(ConfigParseError, ValidationError)
        assert issubclass(DomainError, ValidationError)
        assert issubclass(SingularSystemError, NumericalError)
        assert issubclass(DivergenceError, NumericalError)
        for cls in (DimensionError, RankOverflowError, DegenerateInstanceError):
            assert issubclass(cls, BilinrankError)

    def test_config_parse_error_key(self):
        error = ConfigParseError("bad", key="gamma")
        assert error.code == "CONFIG_PARSE_ERROR"
        assert error.to_dict()["key"] == "gamma"

    def test_dimension_error_payload(self):
        error = DimensionError("mismatch", expected=(2, 3), got=(3, 2))
        data = error.to_dict()
        assert data["code"] == "DIMENSION_MISMATCH"
        assert data["expected"] == "(2, 3)"
        assert data["got"] == "(3, 2)"

    def test_singular_system_column(self):
        error = SingularSystemError("deficient", column=4)
        assert error.code == "SINGULAR_SYSTEM"
        assert error.to_dict()["column"] == 4

    def test_divergence_trace(self):
        error = DivergenceError("diverged", trace=[1.0, 1e7])
        assert error.to_dict()["trace"] == [1.0, 1e7]
        assert DivergenceError("x").trace == []

    def test_rank_overflow_message(self):
        error = RankOverflowError(rank=5, k=3)
        assert error.rank == 5 and error.k == 3
        assert "5" in error.message and "3" in error.message

    def test_repr(self):
        assert repr(DomainError("neg")) == "DomainError(code='DOMAIN_ERROR', message='neg')"


class TestConstants:
    """Test constants"""

    def test_solver_defaults(self):
        assert SolverDefaults.LAMBDA0 == 1e-2
        assert SolverDefaults.LAMBDA_DOWN < 1 < SolverDefaults.LAMBDA_UP
        assert SolverDefaults.MAX_ITERS == 500

    def test_frozen(self):
        with pytest.raises(AttributeError):
            SolverDefaults.LAMBDA0 = 1.0  # type: ignore[misc]

    def test_supported_values(self):
        assert "fmu" in SupportedValues.PENALTY_KINDS
        assert set(SupportedValues.NON_DIFFERENTIABLE_KINDS) <= set(SupportedValues.PENALTY_KINDS)
        assert Tolerances.RANK_REL == 1e-9


class TestValidation:
    """Test validation functions"""

    def test_validate_positive(self):
        assert validate_positive("mu", 4) == 4.0
        for bad in (0, -1.0, float("nan"), float("inf")):
            with pytest.raises(ValidationError):
                validate_positive("mu", bad)

    def test_validate_nonnegative(self):
        assert validate_nonnegative("x", 0.0) == 0.0
        with pytest.raises(DomainError):
            validate_nonnegative("x", -1e-3)

    def test_validate_fraction(self):
        assert validate_fraction("frac", 0.0) == 0.0
        assert validate_fraction("eta", 1.0, allow_one=True) == 1.0
        with pytest.raises(DomainError):
            validate_fraction("frac", 1.0)
        with pytest.raises(DomainError):
            validate_fraction("frac", -0.1)

    def test_validate_positive_int(self):
        assert validate_positive_int("k", np.int64(3)) == 3
        assert validate_positive_int("r", 0, minimum=0) == 0
        with pytest.raises(ValidationError):
            validate_positive_int("k", 0)
        with pytest.raises(ValidationError):
            validate_positive_int("k", True)
        with pytest.raises(ValidationError):
            validate_positive_int("k", 2.0)

    def test_validate_matrix(self):
        X = validate_matrix("X", [[1, 2], [3, 4]], shape=(2, 2))
        assert X.dtype == float
        with pytest.raises(DimensionError):
            validate_matrix("X", np.zeros(3))
        with pytest.raises(DimensionError):
            validate_matrix("X", np.zeros((2, 3)), shape=(3, 2))
        with pytest.raises(NumericalError):
            validate_matrix("X", np.array([[np.nan]]))

    def test_validate_vector(self):
        assert validate_vector("b", np.zeros(4), length=4).shape == (4,)
        with pytest.raises(DimensionError):
            validate_vector("b", np.zeros(4), length=5)
        with pytest.raises(NumericalError):
            validate_vector("b", np.array([np.inf]))
