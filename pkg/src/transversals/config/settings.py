"""Application configuration using pydantic-settings."""

from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Settings loaded from environment variables (prefix ``TRANSVERSALS_``)."""

    model_config = SettingsConfigDict(
        env_prefix="TRANSVERSALS_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Application
    app_name: str = "colorful-transversals"
    debug: bool = False
    log_level: str = "WARNING"

    # Enumeration caps
    max_family: int = Field(default=10, ge=0, description="Max family size for exhaustive checks")
    max_vertices: int = Field(default=20, ge=1, description="Max vertex pool for covectors")
    max_dimension: int = Field(default=5, ge=1, description="Max lifted dimension for covectors")
    max_axiom_ground: int = Field(default=12, ge=0, description="Max ground set for axiom checks")
    max_faces: int = Field(default=2**16, ge=1, description="Max simplicial complex size")

    # Execution
    jobs: int = Field(default=1, ge=1, description="Worker processes for sharded enumerations")
    equivalence_trials: int = Field(default=200, ge=0, description="Lifting self-test samples")


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
