"""Settings shared by the library, the suite runner and the CLI.

Only the mathematical constants take part in the configuration hash; runtime
knobs such as the worker count or the log level never change a result.
"""
import hashlib
import logging
from fractions import Fraction
from functools import lru_cache
from typing import Any

import orjson
from pydantic import BaseSettings, Field, validator

logger = logging.getLogger(__name__)

HASHED_FIELDS = (
    "wendl_rank_constant",
    "wendl_ell_factor",
    "ellipticity_random_probes",
    "petri_search_bound",
)


class Settings(BaseSettings):
    """Configuration read from ``EQBN_*`` environment variables."""

    wendl_rank_constant: Fraction = Field(
        Fraction(1, 16),
        description="Constant c of the certified bound rank >= ceil(c * ell^2).",
    )
    wendl_ell_factor: int = Field(
        8, ge=1, description="Certification requires ell >= factor * d."
    )
    ellipticity_random_probes: int = Field(
        20, ge=0, description="Seeded random covectors tried by the ellipticity check."
    )
    petri_search_bound: int = Field(
        1,
        ge=1,
        description=(
            "Coefficient box [-bound, bound] for the rank-rho Petri search"
            " on kernels of dimension >= 3."
        ),
    )
    workers: int = Field(1, ge=1, description="Threads used by the suite runner.")
    log_level: str = Field("WARNING", description="Root log level for the CLI.")

    class Config:
        env_prefix = "EQBN_"
        arbitrary_types_allowed = True

    @validator("wendl_rank_constant", pre=True)
    def _parse_fraction(cls, value: Any) -> Fraction:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, (list, tuple)) and len(value) == 2:
            return Fraction(int(value[0]), int(value[1]))
        result = Fraction(str(value).strip())
        if result <= 0:
            raise ValueError("wendl_rank_constant must be positive")
        return result

    @validator("log_level")
    def _check_level(cls, value: str) -> str:
        value = value.upper()
        if value not in logging._nameToLevel:
            raise ValueError(f"Unknown log level: {value}")
        return value


def config_hash(settings: Settings) -> str:
    """SHA-256 over the canonical dump of the mathematical constants."""
    payload = {name: str(getattr(settings, name)) for name in HASHED_FIELDS}
    return hashlib.sha256(orjson.dumps(payload, option=orjson.OPT_SORT_KEYS)).hexdigest()


# PUBLIC API

DEFAULT_CONFIG_HASH = config_hash(Settings.construct())


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    settings = Settings()
    if config_hash(settings) != DEFAULT_CONFIG_HASH:
        logger.warning("Mathematical constants differ from the shipped defaults.")
    return settings
