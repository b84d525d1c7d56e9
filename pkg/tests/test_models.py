from decimal import Decimal
from fractions import Fraction

import pytest
from pydantic import ValidationError

from sinr_coloring.config import Config
from sinr_coloring.models import CellStats, SweepLimits, format_decimal, format_rational, parse_rational


def test_rational_helpers():
    assert parse_rational("11/2") == Fraction(11, 2)
    assert parse_rational("0.25") == Fraction(1, 4)
    assert parse_rational(Decimal("316.23")) == Fraction(31623, 100)
    assert format_rational(Fraction(6)) == "6/1"
    assert format_decimal(Fraction(1, 4)) == "0.25"
    assert format_decimal(Fraction(-3, 8)) == "-0.375"
    assert format_decimal(Fraction(1000)) == "1000"
    with pytest.raises(ValueError):
        format_decimal(Fraction(1, 3))
    with pytest.raises(ValueError):
        parse_rational(True)


def test_cell_stats_conservation():
    CellStats(n_nodes=10, side_km=Decimal(1), n_instances=3, n_pass=2, n_fail_empty=1)
    with pytest.raises(ValidationError):
        CellStats(n_nodes=10, side_km=Decimal(1), n_instances=3, n_pass=1)
    with pytest.raises(ValidationError):
        CellStats(n_nodes=10, side_km=Decimal(1), n_instances=1, n_pass=1, n_strict=2)
    with pytest.raises(ValidationError):
        CellStats(n_nodes=10, side_km=Decimal(1), n_instances=1, n_pass=1, n_strict=1, ratios=["1/1"])


def test_config_defaults(monkeypatch):
    for key in ("SINR_POWER_MW", "SINR_NOISE_MW", "SINR_BETA", "SINR_ALPHA"):
        monkeypatch.delenv(key, raising=False)
    params = Config(_env_file=None).phys_params()
    assert params.power == 300
    assert params.noise == Fraction(8, 10**11)
    assert params.threshold == Fraction(31623, 100)
    assert params.alpha_is_even


def test_config_from_environment(monkeypatch):
    monkeypatch.setenv("SINR_BETA", "10")
    monkeypatch.setenv("SINR_MAX_LINKS", "64")
    config = Config(_env_file=None)
    assert config.phys_params().threshold == 10
    assert config.limits().max_links == 64


def test_link_limit_is_capped_at_bitset_width(monkeypatch):
    assert SweepLimits(max_links=128).max_links == 128
    with pytest.raises(ValidationError):
        SweepLimits(max_links=129)
    monkeypatch.setenv("SINR_MAX_LINKS", "1000")
    with pytest.raises(ValidationError):
        Config(_env_file=None)
