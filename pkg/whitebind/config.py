"""Search limits and environment configuration."""

import os
from dataclasses import dataclass, replace

from dotenv import load_dotenv

MAX_LEVEL_SET_ENV = "WHITEBIND_MAX_LEVEL_SET"
MAX_MOVES_ENV = "WHITEBIND_MAX_MOVES"
LOG_LEVEL_ENV = "WHITEBIND_LOG_LEVEL"

DEFAULT_MAX_LEVEL_SET = 200_000
DEFAULT_MAX_MOVES = 10_000_000


@dataclass(frozen=True)
class Limits:
    """Caps on the Whitehead searches.

    Attributes:
        max_level_set: Largest number of members a level set may reach
        max_moves: Largest number of move applications one decision may spend
    """

    max_level_set: int = DEFAULT_MAX_LEVEL_SET
    max_moves: int = DEFAULT_MAX_MOVES

    def __post_init__(self) -> None:
        if self.max_level_set < 1:
            raise ValueError(f"max_level_set must be positive, got {self.max_level_set}")
        if self.max_moves < 1:
            raise ValueError(f"max_moves must be positive, got {self.max_moves}")


def _read_positive_int(name: str) -> int | None:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return None
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}") from None
    if value < 1:
        raise ValueError(f"{name} must be positive, got {value}")
    return value


def load_limits(max_level_set: int | None = None, max_moves: int | None = None) -> Limits:
    """Build the limits for a run.

    Explicit arguments win over the environment (and a .env file), which wins over
    the defaults.

    Args:
        max_level_set: Override for the level-set cap
        max_moves: Override for the move-application cap

    Returns:
        The resolved Limits
    """
    load_dotenv()

    limits = Limits()
    env_level_set = _read_positive_int(MAX_LEVEL_SET_ENV)
    if env_level_set is not None:
        limits = replace(limits, max_level_set=env_level_set)
    env_moves = _read_positive_int(MAX_MOVES_ENV)
    if env_moves is not None:
        limits = replace(limits, max_moves=env_moves)

    if max_level_set is not None:
        limits = replace(limits, max_level_set=max_level_set)
    if max_moves is not None:
        limits = replace(limits, max_moves=max_moves)
    return limits


def default_log_level() -> str:
    """Log level from WHITEBIND_LOG_LEVEL, INFO when unset."""
    load_dotenv()
    return os.environ.get(LOG_LEVEL_ENV, "INFO").upper()
