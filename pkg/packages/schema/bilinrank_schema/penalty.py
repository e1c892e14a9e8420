"""
Singular-value penalty descriptions.

A Penalty names one member of the concave penalty family together with its
parameters. It is pure data: evaluation, derivatives and proximal maps live in
bilinrank_core.penalties.

String form (CLI flags and config files):

    fmu:mu=4.0
    nuclear:mu=2.0
    scad:lambda=1.0,gamma=3.7
    schatten:lambda=1.0,q=0.5

Usage:
    from bilinrank_schema import Penalty, parse_penalty

    p = parse_penalty("fmu:mu=4")
    assert p == Penalty.fmu(4.0)
    assert format_penalty(p) == "fmu:mu=4.0"
"""

import math
from enum import Enum
from typing import Dict, Optional, Tuple

from bilinrank_common import ConfigParseError, ValidationError
from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing_extensions import Self


class PenaltyKind(str, Enum):
    """Members of the penalty family."""

    FMU = "fmu"
    NUCLEAR = "nuclear"
    SCAD = "scad"
    LOG = "log"
    MCP = "mcp"
    ETP = "etp"
    GEMAN = "geman"
    RANK = "rank"
    SCHATTEN = "schatten"


# Parameters each kind takes, in string-form order
PARAMETERS: Dict[PenaltyKind, Tuple[str, ...]] = {
    PenaltyKind.FMU: ("mu",),
    PenaltyKind.NUCLEAR: ("mu",),
    PenaltyKind.RANK: ("mu",),
    PenaltyKind.SCAD: ("lambda", "gamma"),
    PenaltyKind.LOG: ("lambda", "gamma"),
    PenaltyKind.MCP: ("lambda", "gamma"),
    PenaltyKind.ETP: ("lambda", "gamma"),
    PenaltyKind.GEMAN: ("lambda", "gamma"),
    PenaltyKind.SCHATTEN: ("lambda", "q"),
}

_ATTRS = {"mu": "mu", "lambda": "lam", "gamma": "gamma", "q": "q"}


class Penalty(BaseModel):
    """
    One concave, non-decreasing singular-value penalty f with f(0) = 0.

    Attributes:
        kind: Member of the family
        mu: Weight for fmu / nuclear / rank
        lam: Scale lambda for the two-parameter kinds (alias "lambda")
        gamma: Shape parameter (SCAD requires gamma > 2)
        q: Schatten exponent in (0, 1]
    """

    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)

    kind: PenaltyKind
    mu: Optional[float] = None
    lam: Optional[float] = Field(default=None, alias="lambda")
    gamma: Optional[float] = None
    q: Optional[float] = None

    @model_validator(mode="after")
    def validate_parameters(self) -> Self:
        """Each kind carries exactly its own parameters, all positive and finite"""
        required = PARAMETERS[self.kind]
        for name, attr in _ATTRS.items():
            value = getattr(self, attr)
            if name in required:
                if value is None:
                    raise ValidationError(f"Penalty '{self.kind.value}' requires parameter '{name}'")
                if not math.isfinite(value) or value <= 0:
                    raise ValidationError(
                        f"Penalty '{self.kind.value}' parameter '{name}' must be positive, got {value}"
                    )
            elif value is not None:
                raise ValidationError(
                    f"Penalty '{self.kind.value}' does not take parameter '{name}'"
                )

        if self.kind == PenaltyKind.SCAD and self.gamma is not None and self.gamma <= 2:
            raise ValidationError(f"SCAD requires gamma > 2, got {self.gamma}")
        if self.kind == PenaltyKind.SCHATTEN and self.q is not None and self.q > 1:
            raise ValidationError(f"Schatten exponent q must lie in (0, 1], got {self.q}")
        return self

    # Constructors -----------------------------------------------------------

    @classmethod
    def fmu(cls, mu: float) -> "Penalty":
        return cls(kind=PenaltyKind.FMU, mu=mu)

    @classmethod
    def nuclear(cls, mu: float) -> "Penalty":
        return cls(kind=PenaltyKind.NUCLEAR, mu=mu)

    @classmethod
    def rank(cls, mu: float) -> "Penalty":
        return cls(kind=PenaltyKind.RANK, mu=mu)

    @classmethod
    def scad(cls, lam: float, gamma: float) -> "Penalty":
        return cls(kind=PenaltyKind.SCAD, lam=lam, gamma=gamma)

    @classmethod
    def log(cls, lam: float, gamma: float) -> "Penalty":
        return cls(kind=PenaltyKind.LOG, lam=lam, gamma=gamma)

    @classmethod
    def mcp(cls, lam: float, gamma: float) -> "Penalty":
        return cls(kind=PenaltyKind.MCP, lam=lam, gamma=gamma)

    @classmethod
    def etp(cls, lam: float, gamma: float) -> "Penalty":
        return cls(kind=PenaltyKind.ETP, lam=lam, gamma=gamma)

    @classmethod
    def geman(cls, lam: float, gamma: float) -> "Penalty":
        return cls(kind=PenaltyKind.GEMAN, lam=lam, gamma=gamma)

    @classmethod
    def schatten(cls, lam: float, q: float) -> "Penalty":
        return cls(kind=PenaltyKind.SCHATTEN, lam=lam, q=q)

    # Views ------------------------------------------------------------------

    def parameters(self) -> Dict[str, float]:
        """Parameters in string-form order, keyed by their external names."""
        return {name: getattr(self, _ATTRS[name]) for name in PARAMETERS[self.kind]}

    def with_parameter(self, name: str, value: float) -> "Penalty":
        """Copy with one parameter replaced (re-validated)."""
        if name not in PARAMETERS[self.kind]:
            raise ValidationError(f"Penalty '{self.kind.value}' does not take parameter '{name}'")
        data = self.parameters()
        data[name] = value
        return Penalty.model_validate({"kind": self.kind, **data})

    def __str__(self) -> str:
        return format_penalty(self)


def parse_penalty(text: str) -> Penalty:
    """
    Parse the "kind:key=value,key=value" string form.

    Raises:
        ConfigParseError: Naming the offending key (or the kind) on any error

    Examples:
        >>> parse_penalty("scad:lambda=1.0,gamma=3.7").gamma
        3.7
    """
    if not isinstance(text, str) or not text.strip():
        raise ConfigParseError("Empty penalty specification", key="kind")

    head, _, tail = text.strip().partition(":")
    kind_name = head.strip().lower()
    try:
        kind = PenaltyKind(kind_name)
    except ValueError:
        allowed = ", ".join(k.value for k in PenaltyKind)
        raise ConfigParseError(
            f"Unknown penalty kind '{kind_name}'. Supported kinds: {allowed}", key=kind_name
        ) from None

    allowed_keys = PARAMETERS[kind]
    values: Dict[str, float] = {}
    for item in filter(None, (part.strip() for part in tail.split(","))):
        if "=" not in item:
            raise ConfigParseError(f"Expected key=value in penalty, got '{item}'", key=item)
        key, raw = (s.strip() for s in item.split("=", 1))
        key = key.lower()
        if key not in allowed_keys:
            raise ConfigParseError(
                f"Penalty '{kind.value}' does not take parameter '{key}'. "
                f"Expected: {', '.join(allowed_keys)}",
                key=key,
            )
        if key in values:
            raise ConfigParseError(f"Duplicate penalty parameter '{key}'", key=key)
        try:
            values[key] = float(raw)
        except ValueError:
            raise ConfigParseError(
                f"Penalty parameter '{key}' is not a number: '{raw}'", key=key
            ) from None

    for key in allowed_keys:
        if key not in values:
            raise ConfigParseError(f"Penalty '{kind.value}' requires parameter '{key}'", key=key)

    try:
        return Penalty.model_validate({"kind": kind, **values})
    except ValidationError as e:
        bad = next((k for k in allowed_keys if f"'{k}'" in e.message or k in e.message), None)
        raise ConfigParseError(e.message, key=bad) from e


def format_penalty(p: Penalty) -> str:
    """Inverse of parse_penalty (float repr keeps every bit)."""
    params = ",".join(f"{name}={value!r}" for name, value in p.parameters().items())
    return f"{p.kind.value}:{params}"
