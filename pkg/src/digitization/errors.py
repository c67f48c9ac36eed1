"""Exception types shared by every module."""


class DigitizationError(Exception):
    """Base class for errors raised by this package."""


class DomainError(DigitizationError, ValueError):
    """An argument lies outside the domain of an operation."""


class ParseError(DigitizationError, ValueError):
    """Malformed formula text or input document."""

    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class ResourceError(DigitizationError, RuntimeError):
    """A configured state cap was exceeded."""

    def __init__(self, what, cap):
        self.what = what
        self.cap = cap
        super().__init__(f"{what} exceeded the state cap of {cap}")
