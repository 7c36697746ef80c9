"""Exception types shared across tropispec."""


class TropispecError(Exception):
    """Base class for all library errors."""


class InputError(TropispecError, ValueError):
    """Malformed or out-of-domain input (CLI exit code 2)."""


class UnsupportedOperation(TropispecError):
    """Operation not defined for the given semiring or degenerate input."""


class ConsistencyError(TropispecError):
    """Two independent computations disagree; indicates a bug (CLI exit code 1)."""
