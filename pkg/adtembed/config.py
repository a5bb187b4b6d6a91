import logging
import os
from functools import lru_cache

from dotenv import load_dotenv
from pydantic import BaseModel, Field

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


class Settings(BaseModel):
    """Runtime options, read from ADTEMBED_* environment variables (or a .env file)."""

    purity_audit: bool = Field(
        default=False,
        description="Evaluate every embedded function body twice and compare the terms",
    )
    log_level: str = Field(default="WARNING", description="Level of the adtembed logger")
    fresh_prefix: str = Field(
        default="x", min_length=1, description="Prefix of generated variable names"
    )
    dedup_defaults: bool = Field(
        default=True, description="Collapse structurally equal switch arms into a default arm"
    )


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    load_dotenv()
    values = {}
    for name in Settings.model_fields:
        raw = os.environ.get(f"ADTEMBED_{name.upper()}")
        if raw is not None:
            values[name] = raw
    return Settings(**values)


def configure_logging(level: str | None = None) -> logging.Logger:
    logger = logging.getLogger("adtembed")
    if not logger.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(handler)
    logger.setLevel((level or get_settings().log_level).upper())
    return logger
