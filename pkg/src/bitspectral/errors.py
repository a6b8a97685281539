"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid user-supplied configuration (bad parameter, bad grid, bad flag)."""


class NumericalError(RuntimeError):
    """Numerical failure: zero matrix, vanished iterate, annihilated truncation."""
