"""Settings loaded from .env and the environment."""
from __future__ import annotations

import logging
import os
from dataclasses import asdict, dataclass
from functools import lru_cache
from pathlib import Path
from typing import Dict

from dotenv import load_dotenv

ROOT_DIR = Path(__file__).resolve().parents[1]
load_dotenv(ROOT_DIR / ".env")

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


def _get_env_int(name: str, default: int, minimum: int = 1) -> int:
    value = os.getenv(name)
    if value is None:
        return default
    try:
        return max(int(value), minimum)
    except ValueError:
        return default


def _get_env_bool(name: str, default: bool) -> bool:
    value = os.getenv(name)
    if value is None:
        return default
    return value.strip().lower() not in ("0", "false", "no", "off", "")


@dataclass(frozen=True)
class Settings:
    n_max: int = 5
    deg_max: int = 12
    jobs: int = 1
    log_level: str = "WARNING"
    prune_zeros: bool = True

    def as_dict(self) -> Dict[str, object]:
        return asdict(self)

    @property
    def logging_level(self) -> int:
        return getattr(logging, self.log_level, logging.WARNING)


def load_settings() -> Settings:
    level = (os.getenv("CONFORMAL_LOG_LEVEL") or "WARNING").strip().upper()
    return Settings(
        n_max=_get_env_int("CONFORMAL_N_MAX", 5),
        deg_max=_get_env_int("CONFORMAL_DEG_MAX", 12),
        jobs=_get_env_int("CONFORMAL_JOBS", 1),
        log_level=level if level in LOG_LEVELS else "WARNING",
        prune_zeros=_get_env_bool("CONFORMAL_PRUNE_ZEROS", True),
    )


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return load_settings()
