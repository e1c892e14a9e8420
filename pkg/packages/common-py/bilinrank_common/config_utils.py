"""
Configuration file helpers for bilinrank

Two file formats are read by the CLI:

1. Solver config files: key=value text mirroring SolverConfig / AdmmConfig
       # damping schedule
       penalty = fmu:mu=512
       lambda0 = 1e-2
       admm_rho = 2.0

2. Experiment specs: YAML documents whose string values may reference
   environment variables as ${VAR} or ${VAR:-default}.

Usage:
    from bilinrank_common.config_utils import load_key_value_file, expand_env_vars

    values = load_key_value_file(Path("solver.cfg"))
    spec_data = expand_env_vars(yaml.safe_load(text))
"""

import os
import re
from pathlib import Path
from typing import Any, Dict, Iterable, Tuple

from .errors import ConfigParseError, ValidationError
from .logger import get_logger

logger = get_logger("common.config")

_ENV_PATTERN = r"\$\{([^}:]+)(?::-)?(([^}]*))?\}"


def parse_key_value(content: str) -> Dict[str, str]:
    """
    Parse key=value config content into a dictionary.

    Handles:
    - KEY=value pairs (whitespace around '=' is ignored)
    - Comments (lines starting with #) and empty lines
    - Quoted values (single and double quotes)
    - Values containing '=' signs (split on the first only)

    Unlike a permissive .env reader, malformed lines are errors: a solver
    config silently dropping a key would change results.

    Args:
        content: Raw file content

    Returns:
        Dictionary of lower-cased keys to raw string values

    Raises:
        ConfigParseError: On a line without '=', an empty key, or a duplicate key
    """
    result: Dict[str, str] = {}

    for lineno, raw in enumerate(content.splitlines(), start=1):
        line = raw.strip()

        if not line or line.startswith("#"):
            continue

        if "=" not in line:
            raise ConfigParseError(f"Line {lineno}: expected key=value, got '{line}'", key=line)

        key, value = line.split("=", 1)
        key = key.strip().lower()
        value = value.strip()

        if not key:
            raise ConfigParseError(f"Line {lineno}: empty key", key="")

        if key in result:
            raise ConfigParseError(f"Line {lineno}: duplicate key '{key}'", key=key)

        if (value.startswith('"') and value.endswith('"')) or (
            value.startswith("'") and value.endswith("'")
        ):
            value = value[1:-1]

        result[key] = value

    return result


def load_key_value_file(path: Path) -> Dict[str, str]:
    """
    Load and parse a key=value config file.

    Raises:
        ValidationError: If the file does not exist
        ConfigParseError: If the content is malformed
    """
    if not path.exists():
        raise ValidationError(f"Config file not found: {path}")
    content = path.read_text(encoding="utf-8")
    result = parse_key_value(content)
    logger.debug("Loaded config file", path=str(path), keys=len(result))
    return result


def split_prefixed(values: Dict[str, str], prefix: str) -> Tuple[Dict[str, str], Dict[str, str]]:
    """
    Split a flat key=value mapping into (unprefixed, prefixed-with-prefix-stripped).

    Examples:
        >>> split_prefixed({"k": "8", "admm_rho": "2"}, "admm_")
        ({'k': '8'}, {'rho': '2'})
    """
    plain: Dict[str, str] = {}
    prefixed: Dict[str, str] = {}
    for key, value in values.items():
        if key.startswith(prefix):
            prefixed[key[len(prefix) :]] = value
        else:
            plain[key] = value
    return plain, prefixed


def reject_unknown_keys(values: Dict[str, Any], allowed: Iterable[str], where: str) -> None:
    """
    Raise ConfigParseError naming the first key not in `allowed`.

    Args:
        values: Parsed mapping
        allowed: Accepted key names
        where: Name of the target section, used in the message
    """
    allowed_set = set(allowed)
    for key in values:
        if key not in allowed_set:
            raise ConfigParseError(
                f"Unknown {where} key '{key}'. Allowed: {', '.join(sorted(allowed_set))}",
                key=key,
            )


def expand_env_vars(data: Any) -> Any:
    """Recursively expand ${VAR} and ${VAR:-default} in dict/list values.

    Args:
        data: Dictionary, list, string, or other value to process

    Returns:
        Data with environment variables expanded

    Raises:
        ValidationError: If required environment variable is missing

    Examples:
        >>> os.environ["REPS"] = "5"
        >>> expand_env_vars({"repetitions": "${REPS}"})
        {'repetitions': '5'}
        >>> expand_env_vars({"out": "${MISSING:-results.csv}"})
        {'out': 'results.csv'}
    """
    if isinstance(data, dict):
        return {key: expand_env_vars(value) for key, value in data.items()}
    elif isinstance(data, list):
        return [expand_env_vars(item) for item in data]
    elif isinstance(data, str):

        def replacer(match: re.Match[str]) -> str:
            var_name = match.group(1)
            default_value = match.group(2) if match.group(2) else None

            if var_name in os.environ:
                return os.environ[var_name]
            elif default_value:
                return default_value
            else:
                raise ValidationError(
                    f"Environment variable '${{{var_name}}}' is required but not set. "
                    f"Either set the variable or use ${{VAR:-default}} syntax for a default value."
                )

        return re.sub(_ENV_PATTERN, replacer, data)
    else:
        return data
