"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid configuration value (CLI exit code 2)."""


class TraceFormatError(ValueError):
    """Malformed scenario CSV or fleet manifest (CLI exit code 3)."""
