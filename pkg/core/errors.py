class LsirmError(Exception):
    """Base class for every error raised by this package."""

class ContractViolation(LsirmError, ValueError):
    """A precondition of an operation does not hold."""

class ConfigError(LsirmError):
    """Invalid configuration, detected before any work starts."""

class DataError(LsirmError):
    """Input data cannot be turned into a usable vote matrix."""
