"""
bilinrank Common Package

Shared utilities and primitives used across all bilinrank packages.

This package provides:
- Exception classes for consistent error handling
- Constants for solver defaults, tolerances and file formats (namespaced)
- Validation utilities for input checking
- Structured JSON logging
- Config-file parsing and dense matrix CSV I/O

Usage:
    from bilinrank_common import ValidationError, SolverDefaults
    from bilinrank_common import get_logger, parse_key_value

    lam = SolverDefaults.LAMBDA0
    tol = Tolerances.RANK_REL
"""

from .config_utils import (
    expand_env_vars,
    load_key_value_file,
    parse_key_value,
    reject_unknown_keys,
    split_prefixed,
)
from .constants import (
    BILINRANK_VERSION,
    LOG_LEVELS,
    SUPPORTED_PENALTY_KINDS,
    SUPPORTED_SOLVERS,
    AdmmDefaults,
    CsvFormat,
    DatagenDefaults,
    EnvVars,
    ExitCodes,
    HarnessDefaults,
    PenaltyGrid,
    SolverDefaults,
    SupportedValues,
    Tolerances,
    VersionInfo,
)
from .errors import (
    BilinrankError,
    ConfigParseError,
    DegenerateInstanceError,
    DimensionError,
    DivergenceError,
    DomainError,
    NumericalError,
    RankOverflowError,
    SingularSystemError,
    ValidationError,
)
from .logger import (
    BilinrankLogger,
    clear_run_id,
    configure_logging,
    get_logger,
    get_run_id,
    set_run_id,
)
from .matrix_io import load_mask_csv, load_matrix_csv, save_mask_csv, save_matrix_csv
from .validation import (
    validate_fraction,
    validate_matrix,
    validate_nonnegative,
    validate_positive,
    validate_positive_int,
    validate_vector,
)

__version__ = BILINRANK_VERSION

__all__ = [
    # Errors
    "BilinrankError",
    "ValidationError",
    "ConfigParseError",
    "DomainError",
    "DimensionError",
    "NumericalError",
    "SingularSystemError",
    "DivergenceError",
    "RankOverflowError",
    "DegenerateInstanceError",
    # Constants
    "VersionInfo",
    "SupportedValues",
    "SolverDefaults",
    "AdmmDefaults",
    "Tolerances",
    "PenaltyGrid",
    "DatagenDefaults",
    "HarnessDefaults",
    "CsvFormat",
    "ExitCodes",
    "EnvVars",
    "BILINRANK_VERSION",
    "SUPPORTED_PENALTY_KINDS",
    "SUPPORTED_SOLVERS",
    "LOG_LEVELS",
    # Validation
    "validate_positive",
    "validate_nonnegative",
    "validate_fraction",
    "validate_positive_int",
    "validate_matrix",
    "validate_vector",
    # Logging
    "BilinrankLogger",
    "get_logger",
    "configure_logging",
    "set_run_id",
    "get_run_id",
    "clear_run_id",
    # Config
    "parse_key_value",
    "load_key_value_file",
    "split_prefixed",
    "reject_unknown_keys",
    "expand_env_vars",
    # Matrix files
    "save_matrix_csv",
    "load_matrix_csv",
    "save_mask_csv",
    "load_mask_csv",
]
