"""Configuration management using Pydantic Settings with python-dotenv."""

from typing import List, Literal

from dotenv import load_dotenv
from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

# Load environment variables from .env file
load_dotenv()


class Settings(BaseSettings):
    """Library, CLI and API settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Logging Configuration
    LOG_LEVEL: str = Field(
        default="WARNING",
        description="Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)",
    )

    # Arithmetic Configuration
    MAX_RESIDUE_FIELD_SIZE: int = Field(
        default=256,
        ge=2,
        le=4096,
        description="Largest residue field cardinality q for which tables are built",
    )
    EPSILON_MAX_LEVEL: int = Field(
        default=8,
        ge=1,
        le=16,
        description="Deepest unit level searched when stabilizing a norm image",
    )
    LAMBDA_WILD_SIGN: int = Field(
        default=1,
        description="Sign s of lambda(E/F, psi) for ramified extensions in residue characteristic 2",
    )

    @field_validator("LAMBDA_WILD_SIGN")
    @classmethod
    def validate_wild_sign(cls, v: int) -> int:
        """Only +1 and -1 keep lambda a fourth root of unity."""
        if v not in (1, -1):
            raise ValueError("LAMBDA_WILD_SIGN must be 1 or -1")
        return v

    # Oracle Configuration
    ORACLE_SIZE_GUARD: int = Field(
        default=1_000_000,
        ge=1,
        le=50_000_000,
        description="Maximum number of elements any brute-force enumeration may visit",
    )

    # Verification Configuration
    DEFAULT_SEED: int = Field(
        default=20240601,
        description="Seed for sampled checks when none is given",
    )
    SUITE_MODE: Literal["sequential", "parallel"] = Field(
        default="sequential",
        description="Execution mode for the verification suite",
    )
    TAIL_VERIFY_TERMS: int = Field(
        default=3,
        ge=1,
        le=8,
        description="Shells past the level evaluated directly against the shell density",
    )
    INCLUDE_APPROXIMATIONS: bool = Field(
        default=True,
        description="Attach float renderings (tagged approximate) to exact values in reports",
    )

    # CORS Configuration
    CORS_ORIGINS: str = Field(
        default="*",
        description="Allowed CORS origins, comma-separated",
    )

    @property
    def cors_origins(self) -> List[str]:
        return [origin.strip() for origin in self.CORS_ORIGINS.split(",") if origin.strip()]

    # API Configuration
    API_PREFIX: str = Field(
        default="/api/v1",
        description="API route prefix",
    )

    # Application Configuration
    APP_NAME: str = Field(
        default="SL(2) Endoscopy Workbench",
        description="Application name",
    )
    APP_VERSION: str = Field(
        default="0.1.0",
        description="Application version",
    )
    DEBUG: bool = Field(
        default=False,
        description="Debug mode",
    )


# Global settings instance
settings = Settings()
