from __future__ import annotations

import logging
import os
from dataclasses import dataclass, replace

from .constant import (
    DEFAULT_ORACLE_STATE_LIMIT,
    DEFAULT_WORK_CEILING,
    WORK_CEILING_ENV,
)
from .exceptions import ConfigError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverSettings:
    """Knobs shared by every solver.

    ``pattern_edge_limit`` bounds the iterative deepening on pattern edges in
    hypergraph mode; ``None`` picks the default derived from the budget.
    """

    work_ceiling: int = DEFAULT_WORK_CEILING
    threads: int = 1
    pattern_edge_limit: int | None = None
    oracle_state_limit: int = DEFAULT_ORACLE_STATE_LIMIT

    def __post_init__(self) -> None:
        if self.work_ceiling < 1:
            raise ConfigError("work ceiling must be positive")
        if self.threads < 1:
            raise ConfigError("threads must be at least 1")
        if self.pattern_edge_limit is not None and self.pattern_edge_limit < 1:
            raise ConfigError("pattern edge limit must be at least 1")
        if self.oracle_state_limit < 1:
            raise ConfigError("oracle state limit must be positive")


def settings_from_env(**overrides: object) -> SolverSettings:
    """Build settings, letting CATCLUST_WORK_CEILING replace the default ceiling.

    Explicit keyword overrides win over the environment.
    """
    settings = SolverSettings()
    raw = os.environ.get(WORK_CEILING_ENV)
    if raw is not None and raw.strip():
        try:
            ceiling = int(raw)
        except ValueError:
            raise ConfigError(f"{WORK_CEILING_ENV} must be an integer, got {raw!r}")
        logger.debug("work ceiling taken from %s: %i", WORK_CEILING_ENV, ceiling)
        settings = replace(settings, work_ceiling=ceiling)
    overrides = {key: value for key, value in overrides.items() if value is not None}
    if overrides:
        settings = replace(settings, **overrides)
    return settings
