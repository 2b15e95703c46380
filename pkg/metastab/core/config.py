from functools import lru_cache
from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    threads: int = Field(default=4, ge=1)
    log_level: str = "INFO"
    output_dir: Path = Path("runs")
    surface_samples: int = Field(default=2048, ge=1)
    ellipticity_floor: float = Field(default=1e-8, gt=0)
    truncation_threshold: float = Field(default=1e-12, gt=0)
    max_order: int = Field(default=200, ge=1)
    fixed_timestamp: str | None = None

    model_config = SettingsConfigDict(env_prefix="METASTAB_", env_file=".env", extra="ignore")


@lru_cache
def get_settings() -> Settings:
    return Settings()


settings = get_settings()
