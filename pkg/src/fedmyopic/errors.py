class FedMyopicError(Exception):
    """Base class for errors raised by this package."""


class InputError(FedMyopicError, ValueError):
    """Invalid argument or malformed input data."""


class CapacityError(FedMyopicError):
    """Requested exact computation is beyond the configured size cap."""
