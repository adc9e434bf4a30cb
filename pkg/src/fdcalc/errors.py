"""Exception types shared across the package."""


class FdcalcError(Exception):
    """Base class for all package errors."""


class InputError(FdcalcError, ValueError):
    """Malformed or inconsistent input.

    ``path`` optionally names the offending location inside a JSON document
    (``$.values[3][0]`` style).
    """

    def __init__(self, message, path=None):
        super().__init__(message if path is None else f"{path}: {message}")
        self.path = path


class CapacityError(FdcalcError):
    """An exhaustive enumeration would exceed the configured cap."""


class GenerationError(FdcalcError):
    """Random instance generation ran out of retries."""
