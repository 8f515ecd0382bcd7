"""Harness settings from the environment (prefix ``FAIRSIM_``) and an optional root ``.env``."""
import logging
from functools import lru_cache
from pathlib import Path

from dotenv import load_dotenv
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

root_dir = Path(__file__).parent.parent
load_dotenv(dotenv_path=root_dir / '.env')
logger = logging.getLogger(__name__)


class HarnessSettings(BaseSettings):
    """
    Defaults for experiment runs.

    Attributes:
        output_dir: Root of the result cache.
        default_trials: Trials per point when a config omits ``trials``.
        jobs: Worker processes for ``run``.
        log_level: Root logging level of the CLI.
        log_factor: Coefficient of ln(n) in the allocator thresholds.
    """
    model_config = SettingsConfigDict(env_prefix="FAIRSIM_", extra="ignore")

    output_dir: Path = Field(default=Path("results"))
    default_trials: int = Field(default=10, ge=1)
    jobs: int = Field(default=1, ge=1)
    log_level: str = Field(default="INFO")
    log_factor: float = Field(default=1.1, gt=1.0)


@lru_cache
def get_settings() -> HarnessSettings:
    settings = HarnessSettings()
    logger.debug("Loaded settings: %s", settings.model_dump())
    return settings
