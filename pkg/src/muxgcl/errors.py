"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes, so new error types should
subclass one of the three roots below rather than ValueError.
"""


class MuxGCLError(Exception):
    """Base class for all package errors."""


class ConfigError(MuxGCLError):
    """Bad configuration: unknown key, invalid value, missing file."""


class DataError(MuxGCLError):
    """Malformed dataset input or shape mismatch between artifacts."""

    def __init__(self, message, *, path=None, line=None):
        loc = ""
        if path is not None:
            loc = f"{path}: " if line is None else f"{path}:{line}: "
        super().__init__(loc + message)
        self.path = path
        self.line = line


class NumericError(MuxGCLError):
    """Non-finite value or diverged computation; carries its origin."""
