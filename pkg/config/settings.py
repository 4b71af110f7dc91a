"""
Simulator Settings

Environment-driven defaults. Values are read from the process environment after
loading an optional ``.env`` file.
"""

import os
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field

# Load environment variables
load_dotenv()

DEFAULT_SEED = 42


class Settings(BaseModel):
    """Defaults applied when a command does not set them explicitly"""
    default_seed: int = Field(default=DEFAULT_SEED, ge=0, lt=2 ** 64, description="Fallback master seed")
    log_level: str = Field(default="INFO", description="Logging level")
    workers: int = Field(default=1, ge=1, description="Worker processes for round execution")


def configured_seed() -> Optional[int]:
    """Seed from MSQKD_SEED, or None when the variable is unset"""
    seed = os.getenv("MSQKD_SEED")
    return int(seed) if seed else None


def get_settings() -> Settings:
    """Read MSQKD_SEED, MSQKD_LOG_LEVEL and MSQKD_WORKERS"""
    values = {}
    seed = configured_seed()
    if seed is not None:
        values["default_seed"] = seed
    level = os.getenv("MSQKD_LOG_LEVEL")
    if level:
        values["log_level"] = level
    workers = os.getenv("MSQKD_WORKERS")
    if workers:
        values["workers"] = int(workers)
    return Settings(**values)


def resolve_seed(explicit: Optional[int]) -> int:
    if explicit is not None:
        return explicit
    return get_settings().default_seed
