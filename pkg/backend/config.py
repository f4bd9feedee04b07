"""
Configuration
Environment-backed settings shared by the CLI, the HTTP service and scripts
"""

import os
from functools import lru_cache
from pathlib import Path

from dotenv import load_dotenv
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

PROJECT_ROOT = Path(__file__).resolve().parent.parent

# Load .env before settings are read
load_dotenv()


class Settings(BaseSettings):
    """Toolkit defaults, overridable through PRCCSL_* environment variables"""

    model_config = SettingsConfigDict(env_prefix="PRCCSL_", extra="ignore")

    seed: int = Field(default=42, description="Default master seed")
    bound: int = Field(default=3000, ge=1, description="Default simulation horizon in ms")
    threshold: float = Field(default=0.95, gt=0, lt=1, description="Default probability threshold")
    alpha: float = Field(default=0.05, gt=0, lt=0.5, description="False-positive strength")
    beta: float = Field(default=0.05, gt=0, lt=0.5, description="False-negative strength")
    delta: float = Field(default=0.01, gt=0, lt=0.5, description="SPRT indifference half-width")
    epsilon: float = Field(default=0.05, gt=0, lt=1, description="Estimation precision")
    confidence: float = Field(default=0.95, gt=0, lt=1, description="Interval confidence")
    max_runs: int = Field(default=10000, ge=1, description="Cap for sequential tests")
    ensemble_runs: int = Field(default=100, ge=1, description="Runs for ensemble verdicts")
    ev_runs: int = Field(default=100, ge=2, description="Runs for expected-value queries")
    jobs: int = Field(default=0, ge=0, description="Worker processes, 0 means all cores")
    av_data_dir: Path = Field(default=PROJECT_ROOT / "data" / "av", description="AV bundle directory")
    log_level: str = Field(default="INFO", description="Logging level")
    host: str = Field(default="0.0.0.0", description="HTTP service host")
    port: int = Field(default=8000, description="HTTP service port")

    def resolved_jobs(self) -> int:
        """Number of worker processes to use"""
        return self.jobs or (os.cpu_count() or 1)


@lru_cache()
def get_settings() -> Settings:
    """Cached settings instance"""
    return Settings()
