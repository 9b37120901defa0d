"""Exception hierarchy; each class maps to a CLI exit code."""


class TamecharError(Exception):
    exit_code = 1


class ValidationError(TamecharError, ValueError):
    """Malformed input or a violated precondition."""

    exit_code = 2


class TruncationError(TamecharError):
    """The truncation level N of the tower is too small for the request."""

    exit_code = 3

    def __init__(self, message: str, required_n: int | None = None):
        if required_n is not None:
            message = f"{message} (required N >= {required_n})"
        super().__init__(message)
        self.required_n = required_n


class InvariantViolation(TamecharError, AssertionError):
    """A mathematical identity that must hold failed; indicates a bug."""

    exit_code = 4
