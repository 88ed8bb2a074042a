"""Exception types shared across the package."""

from __future__ import annotations


class CohftError(Exception):
    """Base class for all package-specific errors."""


class UnstablePair(CohftError):
    """Raised for (g, n) with 2g - 2 + n <= 0, or for (g, n) = (1, 0)."""


class CapExceeded(CohftError):
    """Raised when a request exceeds the configured resource caps."""


class NotSemisimpleOverBaseField(CohftError):
    """Raised when an algebra has no full rational idempotent decomposition."""


class DimensionMismatch(CohftError):
    """Raised when an exact dimension-count precondition fails."""


class NonvanishingLowOrder(CohftError):
    """Raised when a series that must start in degree 2 has lower-order terms."""


class NotDivisible(CohftError):
    """Raised when an exact polynomial division leaves a remainder."""


class MissingTableEntry(CohftError):
    """Raised when a correlator table lacks a required key."""

    def __init__(self, key):
        super().__init__(f"missing table entry for key {key!r}")
        self.key = key


class GradingInconsistent(CohftError):
    """Raised when grading operators violate their defining relations."""


class InsufficientOrder(CohftError):
    """Raised when supplied series data is shorter than the requested order."""


class SchemaError(CohftError):
    """Raised on malformed input documents; carries a JSON pointer path."""

    def __init__(self, pointer: str, message: str):
        super().__init__(f"{pointer}: {message}")
        self.pointer = pointer
        self.reason = message
