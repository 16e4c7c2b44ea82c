class KKSpectraError(Exception):
    pass


class ModelError(KKSpectraError, ValueError):
    """Invalid mathematical input: wrong dimensions, degenerate data,
    preconditions of an operation not met."""


class ConvergenceError(KKSpectraError, RuntimeError):
    pass


class ConfigError(KKSpectraError):
    """Unreadable or schema-invalid scenario configuration."""
