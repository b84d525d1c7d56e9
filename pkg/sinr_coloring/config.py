from decimal import Decimal
from pathlib import Path
from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from .models import LINK_CAPACITY, PhysParams, SweepLimits


class Config(BaseSettings):
    """
    Application configuration loaded from environment variables and .env file.

    Defaults are the physical constants of the reference experiments:
    P = 300 mW, noise 8e-11 mW, beta = 316.23 (25 dB), alpha = 4.
    """

    # Physical model
    power_mw: Decimal = Field(default=Decimal("300"), alias="SINR_POWER_MW")
    noise_mw: Decimal = Field(default=Decimal("8e-11"), alias="SINR_NOISE_MW")
    beta: Decimal = Field(default=Decimal("316.23"), alias="SINR_BETA")
    alpha: Decimal = Field(default=Decimal("4"), alias="SINR_ALPHA")

    # Node coordinates are multiples of 10**-coord_digits metres
    coord_digits: int = Field(default=6, alias="SINR_COORD_DIGITS")

    # Instance filters
    max_links: int = Field(default=LINK_CAPACITY, gt=0, le=LINK_CAPACITY, alias="SINR_MAX_LINKS")
    max_matchings: int = Field(default=50_000_000, alias="SINR_MAX_MATCHINGS")

    # Sweeps
    budget_s: float = Field(default=300.0, alias="SINR_BUDGET_S")
    instances_per_cell: int = Field(default=100, alias="SINR_INSTANCES_PER_CELL")
    jobs: int = Field(default=1, alias="SINR_JOBS")

    # Logging
    log_level: str = Field(default="INFO", alias="SINR_LOG_LEVEL")
    log_file: Optional[Path] = Field(default=None, alias="SINR_LOG_FILE")

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    def phys_params(self) -> PhysParams:
        return PhysParams(
            power_mw=self.power_mw,
            noise_mw=self.noise_mw,
            beta=self.beta,
            alpha=self.alpha,
        )

    def limits(self) -> SweepLimits:
        return SweepLimits(max_links=self.max_links, max_matchings=self.max_matchings)


def load_config() -> "Config":
    return Config()
