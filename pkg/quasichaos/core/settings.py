# quasichaos/core/settings.py
# Loads runtime settings from quasichaos.env/.env using pydantic-settings.

from __future__ import annotations

from functools import lru_cache
from pathlib import Path
from typing import Literal

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=("quasichaos.env", ".env"),
        env_file_encoding="utf-8",
        extra="ignore",
        case_sensitive=False,
    )

    # --- Execution ---
    workers: int = Field(default=1, ge=1, alias="QUASICHAOS_WORKERS")
    seed: int = Field(default=0, ge=0, alias="QUASICHAOS_SEED")
    preset: Literal["paper", "ci"] = Field(default="paper", alias="QUASICHAOS_PRESET")

    # --- Output ---
    output_dir: Path = Field(default=Path("./runs"), alias="QUASICHAOS_OUTPUT_DIR")

    # --- Logging ---
    log_level: str = Field(default="INFO", alias="QUASICHAOS_LOG_LEVEL")

    @property
    def is_ci(self) -> bool:
        return self.preset == "ci"


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings()
