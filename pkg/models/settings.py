"""
Runtime settings
Values come from LEVELSET_* environment variables or a local .env file
"""
from functools import lru_cache
from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process-wide defaults for logging, verification and parallelism"""
    model_config = SettingsConfigDict(env_prefix="LEVELSET_", env_file=".env", extra="ignore")

    log_level: str = "INFO"
    log_file: Optional[str] = None  # e.g. logs/levelset.log

    # Verification
    excess_slack: float = Field(default=1e-9, ge=0.0)
    level_set_samples: int = Field(default=1000, ge=1)
    random_points_per_cube: int = Field(default=1000, ge=0)
    random_check_max_cubes: int = Field(default=10_000, ge=0)
    default_grid_n: int = Field(default=256, ge=2)

    # Engine
    workers: int = Field(default=1, ge=1)


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Cached settings instance"""
    return Settings()
