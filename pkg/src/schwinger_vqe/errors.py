"""Exception types shared across the toolkit."""


class UsageError(ValueError):
    """Raised when an operation is called with arguments violating its contract."""


class ResourceCapError(RuntimeError):
    """Raised when a dense computation would exceed its configured qubit cap."""


class ConfigError(ValueError):
    """Raised for malformed or inconsistent run configurations."""
