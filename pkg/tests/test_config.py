import logging

import pytest

from src.config import Settings, load_settings

ENV_NAMES = [
    "CONFORMAL_N_MAX",
    "CONFORMAL_DEG_MAX",
    "CONFORMAL_JOBS",
    "CONFORMAL_LOG_LEVEL",
    "CONFORMAL_PRUNE_ZEROS",
]


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ENV_NAMES:
        monkeypatch.delenv(name, raising=False)


def test_defaults():
    assert load_settings() == Settings()
    assert Settings().logging_level == logging.WARNING


def test_values_from_environment(monkeypatch):
    monkeypatch.setenv("CONFORMAL_N_MAX", "4")
    monkeypatch.setenv("CONFORMAL_DEG_MAX", "9")
    monkeypatch.setenv("CONFORMAL_JOBS", "3")
    monkeypatch.setenv("CONFORMAL_LOG_LEVEL", "debug")
    monkeypatch.setenv("CONFORMAL_PRUNE_ZEROS", "off")
    settings = load_settings()
    assert settings.as_dict() == {
        "n_max": 4,
        "deg_max": 9,
        "jobs": 3,
        "log_level": "DEBUG",
        "prune_zeros": False,
    }
    assert settings.logging_level == logging.DEBUG


def test_malformed_values_fall_back(monkeypatch):
    monkeypatch.setenv("CONFORMAL_N_MAX", "five")
    monkeypatch.setenv("CONFORMAL_JOBS", "0")
    monkeypatch.setenv("CONFORMAL_LOG_LEVEL", "LOUD")
    settings = load_settings()
    assert settings.n_max == 5
    assert settings.jobs == 1
    assert settings.log_level == "WARNING"
