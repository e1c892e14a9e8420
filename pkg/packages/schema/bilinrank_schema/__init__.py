"""
bilinrank Schema Package

Typed data for bilinrank: penalty descriptions, solver configurations,
experiment specs and result reports.

This package provides:
- Penalty: one member of the concave singular-value penalty family
- SolverConfig / AdmmConfig: solver settings with validation
- ExperimentSpec: YAML experiment files for the harness
- SolveReport / CertificateReport: results, JSON-serializable
- Serialization helpers (pure transformations, no file I/O)

Usage:
    from bilinrank_schema import Penalty, SolverConfig, parse_penalty

    cfg = SolverConfig(penalty=parse_penalty("fmu:mu=512"), k=8)
"""

from .experiment_v1 import (
    AdmmSettings,
    BiasSpec,
    ExperimentSpec,
    InstanceSpec,
    NrsfmSpec,
    PoseSpec,
    Table1Grid,
    VarproSettings,
)
from .penalty import PARAMETERS, Penalty, PenaltyKind, format_penalty, parse_penalty
from .reports import (
    CertificateReport,
    IterationRecord,
    SolveReport,
    TerminationReason,
    report_summary,
)
from .serialization import (
    experiment_from_dict,
    report_from_json,
    to_dict,
    to_json_string,
    to_yaml_string,
)
from .solver_config import ADMM_KEYS, SOLVER_KEYS, AdmmConfig, SolverConfig, configs_from_key_values

__version__ = "0.1.0"

__all__ = [
    # Penalties
    "Penalty",
    "PenaltyKind",
    "PARAMETERS",
    "parse_penalty",
    "format_penalty",
    # Configs
    "SolverConfig",
    "AdmmConfig",
    "SOLVER_KEYS",
    "ADMM_KEYS",
    "configs_from_key_values",
    # Experiments
    "ExperimentSpec",
    "InstanceSpec",
    "VarproSettings",
    "AdmmSettings",
    "Table1Grid",
    "BiasSpec",
    "PoseSpec",
    "NrsfmSpec",
    # Reports
    "IterationRecord",
    "SolveReport",
    "CertificateReport",
    "TerminationReason",
    "report_summary",
    # Serialization
    "to_dict",
    "to_yaml_string",
    "to_json_string",
    "experiment_from_dict",
    "report_from_json",
]
