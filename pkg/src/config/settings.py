"""
Configuration settings for the DecoyBound application.
Each configuration class handles a specific domain of settings.
"""

from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict
from dotenv import load_dotenv

from src.config.enums import OutputFormat, SignalCountReading
from src.logger.logging_utils import LogLevel

# ------------------------------------------------------------------
# Load .env file explicitly
# ------------------------------------------------------------------
PROJECT_ROOT = Path(__file__).resolve().parent.parent.parent
ENV_FILE = PROJECT_ROOT / ".env"

if ENV_FILE.exists():
    load_dotenv(ENV_FILE)


# ------------------------------------------------------------------
# Core Settings
# ------------------------------------------------------------------
class CoreAppSettings(BaseSettings):
    ENV: str = Field(default="development")
    APP_NAME: str = Field(default="DecoyBound")

    model_config = SettingsConfigDict(env_file=ENV_FILE, extra="ignore")


# ------------------------------------------------------------------
# Bound / Key Rate Analysis
# ------------------------------------------------------------------
class AnalysisSettings(BaseSettings):
    """
    Defaults for the bound and key-rate computations. Every value can be
    overridden per run from the run config or the CLI flags.
    """

    SIGMA_MULT: float = Field(default=10.0, ge=0.0)
    GRID_N: int = Field(default=1001, ge=2)
    GRID_REFINE_POINTS: int = Field(default=101, ge=0)
    SIGNAL_COUNT_READING: SignalCountReading = Field(default=SignalCountReading.TOTAL)
    CONDITION_REL_TOL: float = Field(default=1e-12, ge=0.0)

    model_config = SettingsConfigDict(env_file=ENV_FILE, extra="ignore")


# ------------------------------------------------------------------
# Simulation
# ------------------------------------------------------------------
class SimulationSettings(BaseSettings):
    SIM_WORKERS: int = Field(default=1, ge=1)
    SIM_BLOCK_LENGTH: int = Field(default=100_000, ge=1)
    MAX_PHOTON_BUCKET: int = Field(default=16, ge=4)

    model_config = SettingsConfigDict(env_file=ENV_FILE, extra="ignore")


# ------------------------------------------------------------------
# Output
# ------------------------------------------------------------------
class OutputSettings(BaseSettings):
    DEFAULT_OUTPUT_FORMAT: OutputFormat = Field(default=OutputFormat.HUMAN)
    FLOAT_PRECISION: int = Field(default=10, ge=1, le=17)
    DEFAULT_TALLY_FILE: str = Field(default="sim_tallies.csv")

    model_config = SettingsConfigDict(env_file=ENV_FILE, extra="ignore")


# ------------------------------------------------------------------
# Logging
# ------------------------------------------------------------------
class LoggingSettings(BaseSettings):
    LOG_LEVEL: str = Field(default=LogLevel.INFO)
    LOG_DIRECTORY: str = Field(default=str(PROJECT_ROOT / "logs"))
    DEV_LOG_FORMAT: str = Field(
        default="%(asctime)s [%(levelname)s] [%(name)s]: %(message)s"
    )
    DATE_FORMAT: str = Field(default="%Y-%m-%dT%H:%M:%S")
    IS_FILE_LOGGING_ENABLED: bool = Field(default=False)

    LOG_RUN_RECORDS: bool = Field(default=False)

    model_config = SettingsConfigDict(env_file=ENV_FILE, extra="ignore")


# ------------------------------------------------------------------
# Main Settings Container
# ------------------------------------------------------------------
class Settings(BaseSettings):
    app: CoreAppSettings = CoreAppSettings()
    analysis: AnalysisSettings = AnalysisSettings()
    simulation: SimulationSettings = SimulationSettings()
    output: OutputSettings = OutputSettings()
    logging: LoggingSettings = LoggingSettings()

    model_config = SettingsConfigDict(env_file=ENV_FILE, extra="ignore")


# Global settings instance
settings = Settings()
