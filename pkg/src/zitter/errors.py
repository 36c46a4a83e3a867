"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A scenario configuration failed schema or range validation."""


class NumericalInstabilityError(RuntimeError):
    """An integration blew up (energy growth beyond the allowed bound)."""
