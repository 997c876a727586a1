"""Shared exception types."""


class ConfigError(ValueError):
    """Invalid configuration or input file (CLI exit code 2)."""


class NumericError(RuntimeError):
    """Numerical failure: non-finite data or a solver breakdown (CLI exit code 3)."""
