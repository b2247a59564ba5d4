"""
Configuration for golflab.

Values come from GOLFLAB_* environment variables (run.sh exports them);
command-line flags override them in main.py.
"""

import os
import platform
from dataclasses import dataclass

from golf_errors import ConfigurationError

TOOL_VERSION = "1.0.0"

DEFAULT_SEED = 0
DEFAULT_THREADS = 1
DATABASE_FILENAME = "golflab_runs.db"


def default_data_dir() -> str:
    """Return the platform data directory for outputs and the run store."""
    if platform.system() == 'Darwin':  # macOS
        return os.path.expanduser('~/Library/Application Support/golflab')
    elif platform.system() == 'Linux':
        return os.path.expanduser('~/.local/share/golflab')
    else:  # Other platforms (Windows, etc.)
        return '.'


def _int_from_env(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == '':
        return default
    try:
        return int(raw)
    except ValueError:
        raise ConfigurationError(f"{name} must be an integer, got {raw!r}")


@dataclass(frozen=True)
class Settings:
    """Resolved environment configuration."""

    seed: int = DEFAULT_SEED
    threads: int = DEFAULT_THREADS
    data_dir: str = '.'
    database: str = DATABASE_FILENAME
    log_level: str = 'WARNING'

    @classmethod
    def from_env(cls) -> 'Settings':
        """Build settings from the GOLFLAB_* variables."""
        seed = _int_from_env('GOLFLAB_SEED', DEFAULT_SEED)
        if seed < 0:
            raise ConfigurationError(f"GOLFLAB_SEED must be non-negative, got {seed}")
        threads = _int_from_env('GOLFLAB_THREADS', DEFAULT_THREADS)
        if threads < 1:
            raise ConfigurationError(f"GOLFLAB_THREADS must be at least 1, got {threads}")

        data_dir = os.environ.get('GOLFLAB_DATA_DIR') or default_data_dir()
        database = os.environ.get('GOLFLAB_DATABASE') or os.path.join(data_dir, DATABASE_FILENAME)
        log_level = (os.environ.get('GOLFLAB_LOG_LEVEL') or 'WARNING').upper()

        return cls(seed=seed, threads=threads, data_dir=data_dir,
                   database=database, log_level=log_level)
