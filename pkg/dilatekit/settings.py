# dilatekit/settings.py
from __future__ import annotations

import logging
import os
from functools import lru_cache
from pathlib import Path

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError

from .errors import ConfigError

logger = logging.getLogger(__name__)

ENV_PREFIX = "DILATEKIT_"


def _find_env_near_package() -> str | None:
    here = Path(__file__).resolve()
    for p in [here.parent, *here.parents]:
        candidate = p / ".env"
        if candidate.exists():
            return str(candidate)
    return None


class Settings(BaseModel):
    threads: int = Field(default_factory=lambda: os.cpu_count() or 1, ge=1)
    bitset_window: int = Field(default=2**28, ge=1)
    search_budget: int = Field(default=10**7, ge=1)
    echo_limit: int = Field(default=1000, ge=0)
    witness_cap: int = Field(default=64, ge=1)
    log_level: str = "WARNING"


def _from_environ() -> dict:
    out = {}
    for name in Settings.model_fields:
        raw = os.getenv(ENV_PREFIX + name.upper())
        if raw is not None and raw.strip():
            out[name] = raw.strip()
    return out


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    env_path = _find_env_near_package()
    # real environment wins over the file
    load_dotenv(env_path or None, override=False)
    logger.debug("Loaded .env from: %s", env_path)
    try:
        return Settings(**_from_environ())
    except ValidationError as e:
        raise ConfigError(f"invalid {ENV_PREFIX}* setting: {e}") from e
