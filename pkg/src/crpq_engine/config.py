"""
Engine Configuration

Manages evaluation switches and resource guards loaded from environment variables.
A .env file in the working tree is honoured, so a benchmark host can keep its
limits next to the data.

Usage:
    from crpq_engine import get_config

    config = get_config()
    config.validate()
    if config.debug_assert:
        ...
"""
import os
import logging
from typing import Optional
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

logger = logging.getLogger(__name__)

DEFAULT_ORACLE_ROW_LIMIT = 10_000_000
DEFAULT_EDGE_COVER_MAX_EDGES = 20
LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL')


class ConfigurationError(Exception):
    """Raised when configuration is invalid or incomplete"""
    pass


def _flag(value: Optional[str]) -> bool:
    """Helper to read an on/off environment value"""
    return (value or '').strip().lower() in ('1', 'true', 'yes', 'on')


def _int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw)
    except ValueError:
        logger.warning(f"Invalid {name}={raw!r}, using {default}")
        return default


class Config:
    """Evaluation configuration"""

    def __init__(self):
        # In-algorithm invariant checks (heavy-set bounds, final-pass lightness)
        self.debug_assert = _flag(os.getenv('CRPQ_DEBUG_ASSERT'))
        self.dump_tables = _flag(os.getenv('CRPQ_DUMP_TABLES'))

        # Resource guards
        self.oracle_row_limit = _int('CRPQ_ORACLE_ROW_LIMIT', DEFAULT_ORACLE_ROW_LIMIT)
        self.edge_cover_max_edges = _int('CRPQ_EDGE_COVER_MAX_EDGES', DEFAULT_EDGE_COVER_MAX_EDGES)

        self.parallel = _flag(os.getenv('CRPQ_PARALLEL'))
        self.log_level = os.getenv('CRPQ_LOG_LEVEL', 'WARNING').strip().upper()

    def validate(self):
        """Validate configuration values"""
        if self.oracle_row_limit < 1:
            raise ConfigurationError("CRPQ_ORACLE_ROW_LIMIT must be positive")
        if self.edge_cover_max_edges < 1:
            raise ConfigurationError("CRPQ_EDGE_COVER_MAX_EDGES must be positive")
        if self.log_level not in LOG_LEVELS:
            raise ConfigurationError(f"CRPQ_LOG_LEVEL must be one of {', '.join(LOG_LEVELS)}")


# Global configuration instance
_config: Optional[Config] = None

def get_config() -> Config:
    """Get the global configuration instance"""
    global _config
    if _config is None:
        _config = Config()
    return _config
