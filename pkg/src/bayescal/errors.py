"""Exception types shared across the package."""


class BayescalError(Exception):
    """Base class for all errors raised by this package."""


class ScoreFileError(BayescalError):
    """A score CSV could not be parsed; carries the offending line number."""

    def __init__(self, path: str, line: int, message: str):
        self.path = str(path)
        self.line = line
        super().__init__(f"{self.path}:{line}: {message}")


class ValidationError(BayescalError, ValueError):
    """A precondition or invariant on inputs was violated."""
