"""Exact computations for tame tori, regular pairs, transfer-factor signs and character values."""

__version__ = "0.1.0"

from .errors import InvariantViolation, TamecharError, TruncationError, ValidationError  # noqa: E402

__all__ = ["InvariantViolation", "TamecharError", "TruncationError", "ValidationError", "__version__"]
