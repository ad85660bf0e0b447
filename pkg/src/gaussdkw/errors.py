"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument is outside the mathematical domain of an operation."""


class ConfigError(ValueError):
    """A configuration value (grid step, sizes, experiment keys) is invalid."""


class ResourceError(RuntimeError):
    """A request exceeds the desk-scale memory/size budget."""
