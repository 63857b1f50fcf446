"""Settings and the configuration hash."""
from fractions import Fraction

import pytest
from pydantic import ValidationError

from eqbn.config import DEFAULT_CONFIG_HASH, Settings, config_hash, get_settings


def test_defaults_hash_to_default_config_hash() -> None:
    settings = get_settings()
    assert settings.wendl_rank_constant == Fraction(1, 16)
    assert settings.wendl_ell_factor == 8
    assert config_hash(settings) == DEFAULT_CONFIG_HASH


def test_runtime_knobs_do_not_change_the_hash(monkeypatch: pytest.MonkeyPatch) -> None:
    """Worker count and log level are not mathematical constants."""
    monkeypatch.setenv("EQBN_WORKERS", "4")
    monkeypatch.setenv("EQBN_LOG_LEVEL", "debug")
    settings = get_settings()
    assert settings.workers == 4
    assert settings.log_level == "DEBUG"
    assert config_hash(settings) == DEFAULT_CONFIG_HASH


def test_changed_constant_changes_the_hash(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("EQBN_WENDL_RANK_CONSTANT", "1/8")
    settings = get_settings()
    assert settings.wendl_rank_constant == Fraction(1, 8)
    assert config_hash(settings) != DEFAULT_CONFIG_HASH


def test_settings_are_cached() -> None:
    assert get_settings() is get_settings()


@pytest.mark.parametrize(
    "overrides",
    [
        {"wendl_rank_constant": "-1/2"},
        {"wendl_ell_factor": 0},
        {"log_level": "chatty"},
    ],
)
def test_invalid_settings_are_rejected(overrides: dict) -> None:
    with pytest.raises(ValidationError):
        Settings(**overrides)
