"""Exception hierarchy shared across the package."""


class PaddyError(Exception):
    """Base class for all errors raised by paddyfield."""


class ConfigurationError(PaddyError, ValueError):
    """Invalid parameter space or runner configuration."""


class UsageError(PaddyError, ValueError):
    """An API was called with arguments that violate its contract."""


class DomainError(PaddyError, ValueError):
    """A function was evaluated outside its mathematical domain."""


class EvaluationError(PaddyError, RuntimeError):
    """The objective returned a non-finite fitness.

    The offending parameter vector is kept on ``params``.
    """

    def __init__(self, message, params=None):
        super().__init__(message)
        self.params = None if params is None else list(params)


class InvariantViolation(PaddyError, RuntimeError):
    """Internal consistency check failed. Always a bug."""


class TrialFormatError(PaddyError):
    """Base class for trial document load failures."""


class TrialParseError(TrialFormatError, ValueError):
    """The document is not well-formed JSON (empty, truncated, ...)."""


class TrialVersionError(TrialFormatError, ValueError):
    """The document declares an unknown format version or RNG algorithm."""


class TrialSchemaError(TrialFormatError, ValueError):
    """The document does not match the trial schema."""


class TrialInvariantError(TrialFormatError, ValueError):
    """The document parses but describes an inconsistent run state."""
