"""
bilinrank Schema Serialization Utilities

Converts models to and from plain data.

IMPORTANT: These are PURE DATA TRANSFORMATIONS - NO FILE I/O
- to_dict(): model -> dict (numpy arrays become nested lists)
- to_yaml_string(): ExperimentSpec -> YAML string
- to_json_string(): SolveReport / CertificateReport -> JSON string
- experiment_from_dict() / report_from_json(): the inverses

Usage:
    from bilinrank_schema import to_json_string, report_from_json

    text = to_json_string(report)
    again = report_from_json(text)
"""

from typing import Any, Dict

from pydantic import BaseModel

from .experiment_v1 import ExperimentSpec
from .reports import SolveReport


def to_dict(model: BaseModel, exclude_none: bool = True) -> Dict[str, Any]:
    """
    Convert a model to a plain Python dictionary (JSON-compatible values).

    Args:
        model: Any bilinrank model
        exclude_none: If True, exclude fields with None values (default: True)
    """
    return model.model_dump(mode="json", exclude_none=exclude_none, by_alias=True)


def to_yaml_string(spec: ExperimentSpec, exclude_none: bool = True) -> str:
    """
    Serialize an ExperimentSpec to a YAML string.

    NOTE: This returns a YAML string, NOT writing to a file.

    Raises:
        ImportError: If pyyaml is not installed
    """
    try:
        import yaml
    except ImportError:
        raise ImportError(
            "PyYAML is required for YAML serialization. Install with: pip install pyyaml"
        ) from None

    data = to_dict(spec, exclude_none=exclude_none)
    return yaml.dump(
        data,
        default_flow_style=False,
        sort_keys=False,
        allow_unicode=True,
    )


def to_json_string(model: BaseModel, indent: int = 2) -> str:
    """Serialize a report model to JSON (the full per-iteration trace included)."""
    return model.model_dump_json(indent=indent, by_alias=True)


def experiment_from_dict(data: Dict[str, Any]) -> ExperimentSpec:
    """
    Create an ExperimentSpec from a dictionary.

    Convenience wrapper around ExperimentSpec.model_validate().
    """
    return ExperimentSpec.model_validate(data)


def report_from_json(text: str) -> SolveReport:
    """Parse a SolveReport written by to_json_string."""
    return SolveReport.model_validate_json(text)
