"""Paddy field algorithm: a density-aware evolutionary optimizer for black-box functions."""

from .engine import (
    GaussianKind,
    IterationReport,
    Mode,
    Plant,
    RunnerConfig,
    RunnerState,
    Seed,
    TerminationReason,
    init_run,
    resume,
    run,
    step,
)
from .errors import (
    ConfigurationError,
    DomainError,
    EvaluationError,
    PaddyError,
    UsageError,
)
from .space import ParamKind, ParamSpec, SpaceSpec

__version__ = "0.1.0"
