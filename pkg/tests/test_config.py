import logging

import pytest
from pydantic import ValidationError

from adtembed.ast import fresh_name
from adtembed.config import configure_logging, get_settings


def test_defaults(monkeypatch):
    for name in ("PURITY_AUDIT", "LOG_LEVEL", "FRESH_PREFIX", "DEDUP_DEFAULTS"):
        monkeypatch.delenv(f"ADTEMBED_{name}", raising=False)
    settings = get_settings()
    assert settings.purity_audit is False
    assert settings.log_level == "WARNING"
    assert settings.fresh_prefix == "x"
    assert settings.dedup_defaults is True


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("ADTEMBED_PURITY_AUDIT", "true")
    monkeypatch.setenv("ADTEMBED_FRESH_PREFIX", "tmp")
    settings = get_settings()
    assert settings.purity_audit is True
    assert fresh_name() == "tmp0"


def test_invalid_setting_is_rejected(monkeypatch):
    monkeypatch.setenv("ADTEMBED_DEDUP_DEFAULTS", "maybe")
    with pytest.raises(ValidationError):
        get_settings()


def test_configure_logging(monkeypatch):
    monkeypatch.setenv("ADTEMBED_LOG_LEVEL", "debug")
    logger = configure_logging()
    assert logger.name == "adtembed"
    assert logger.level == logging.DEBUG
    assert configure_logging("error").level == logging.ERROR
    assert len(logger.handlers) == 1
    logger.setLevel(logging.WARNING)
