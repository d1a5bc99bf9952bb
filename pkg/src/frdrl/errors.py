"""Exception types shared across the package."""


class FrdrlError(Exception):
    """Base class for all frdrl errors."""


class ConfigError(FrdrlError):
    """Invalid experiment configuration (CLI exit code 1)."""


class DataError(FrdrlError):
    """Unusable input data or model file (CLI exit code 2)."""


class DivergenceError(FrdrlError):
    """Non-finite or exploding values during training (CLI exit code 3)."""
