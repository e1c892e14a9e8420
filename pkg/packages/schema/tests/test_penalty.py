"""
Tests for Penalty models and the penalty string form
"""

import pytest
from bilinrank_common import ConfigParseError, ValidationError

from bilinrank_schema import Penalty, PenaltyKind, format_penalty, parse_penalty


class TestPenaltyModel:
    """Test Penalty construction and validation"""

    def test_constructors(self):
        assert Penalty.fmu(4.0).mu == 4.0
        assert Penalty.scad(1.0, 3.7).gamma == 3.7
        assert Penalty.schatten(1.0, 0.5).q == 0.5
        assert Penalty.geman(1.0, 1.0).lam == 1.0

    def test_lambda_alias(self):
        p = Penalty.model_validate({"kind": "log", "lambda": 2.0, "gamma": 1.0})
        assert p.lam == 2.0
        assert p.parameters() == {"lambda": 2.0, "gamma": 1.0}

    def test_frozen_and_hashable(self):
        p = Penalty.fmu(4.0)
        with pytest.raises(Exception):
            p.mu = 5.0  # type: ignore[misc]
        assert hash(p) == hash(Penalty.fmu(4.0))

    def test_missing_parameter(self):
        with pytest.raises(ValidationError, match="requires parameter 'mu'"):
            Penalty(kind=PenaltyKind.FMU)

    def test_extraneous_parameter(self):
        with pytest.raises(ValidationError, match="does not take parameter 'gamma'"):
            Penalty(kind=PenaltyKind.NUCLEAR, mu=1.0, gamma=2.0)

    @pytest.mark.parametrize("mu", [0.0, -1.0, float("inf")])
    def test_non_positive(self, mu):
        with pytest.raises(ValidationError):
            Penalty.fmu(mu)

    def test_scad_gamma(self):
        with pytest.raises(ValidationError, match="gamma > 2"):
            Penalty.scad(1.0, 2.0)

    def test_schatten_q_range(self):
        with pytest.raises(ValidationError):
            Penalty.schatten(1.0, 1.5)
        assert Penalty.schatten(1.0, 1.0).q == 1.0

    def test_with_parameter(self):
        p = Penalty.mcp(1.0, 2.0).with_parameter("lambda", 3.0)
        assert p == Penalty.mcp(3.0, 2.0)
        with pytest.raises(ValidationError):
            Penalty.fmu(1.0).with_parameter("gamma", 1.0)


class TestPenaltyString:
    """Test parse_penalty / format_penalty"""

    def test_parse_examples(self):
        assert parse_penalty("fmu:mu=4.0") == Penalty.fmu(4.0)
        assert parse_penalty("nuclear:mu=2.0") == Penalty.nuclear(2.0)
        assert parse_penalty("scad:lambda=1.0,gamma=3.7") == Penalty.scad(1.0, 3.7)
        assert parse_penalty(" SCAD : gamma = 3.7 , lambda = 1 ") == Penalty.scad(1.0, 3.7)

    def test_format(self):
        assert format_penalty(Penalty.fmu(4)) == "fmu:mu=4.0"
        assert str(Penalty.scad(1.0, 3.7)) == "scad:lambda=1.0,gamma=3.7"

    def test_format_keeps_every_bit(self):
        p = Penalty.log(0.1 + 0.2, 1.0 / 3.0)
        assert parse_penalty(format_penalty(p)) == p

    def test_unknown_kind(self):
        with pytest.raises(ConfigParseError) as exc:
            parse_penalty("lasso:mu=1")
        assert exc.value.key == "lasso"

    def test_unknown_key(self):
        with pytest.raises(ConfigParseError) as exc:
            parse_penalty("fmu:lambda=1")
        assert exc.value.key == "lambda"

    def test_missing_key(self):
        with pytest.raises(ConfigParseError) as exc:
            parse_penalty("scad:lambda=1.0")
        assert exc.value.key == "gamma"

    def test_not_a_number(self):
        with pytest.raises(ConfigParseError) as exc:
            parse_penalty("fmu:mu=four")
        assert exc.value.key == "mu"

    def test_invalid_value_names_key(self):
        with pytest.raises(ConfigParseError) as exc:
            parse_penalty("scad:lambda=1.0,gamma=1.5")
        assert exc.value.key == "gamma"

    def test_missing_equals(self):
        with pytest.raises(ConfigParseError):
            parse_penalty("fmu:mu")

    def test_duplicate(self):
        with pytest.raises(ConfigParseError) as exc:
            parse_penalty("fmu:mu=1,mu=2")
        assert exc.value.key == "mu"

    def test_empty(self):
        with pytest.raises(ConfigParseError):
            parse_penalty("  ")
