"""Exception types shared across the simulator."""


class VtmsimError(Exception):
    """Base class for all simulator errors."""


class ConfigError(VtmsimError):
    """A parameter set or config file violates its invariants."""


class NoEvidenceError(VtmsimError):
    """An operation needs at least one interaction/observation and got none."""


class StaleEventError(VtmsimError):
    """An interaction record lies outside the effective period."""


class InfeasibleCoalitionError(VtmsimError):
    """A coalition offers zero total bandwidth and cannot serve migrations."""


class SizeLimitError(VtmsimError):
    """An exhaustive check was asked for an instance too large to enumerate."""


class UsageError(VtmsimError):
    """Caller violated an operation precondition (mismatched inputs etc.)."""
