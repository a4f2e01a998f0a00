"""Exception types shared across the package."""


class CasimirKickError(Exception):
    """Base class for all errors raised by casimirkick."""


class ValidationError(CasimirKickError, ValueError):
    """An input value is outside its physical domain.

    The offending field name is kept on ``field`` so callers (the CLI in
    particular) can report it without parsing the message.
    """

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class RangeError(CasimirKickError, ArithmeticError):
    """A closed-form evaluation would leave the representable float range."""


class IntegrationError(CasimirKickError, RuntimeError):
    """The adaptive integrator failed or produced an unacceptable result."""

    def __init__(self, message, time=None):
        self.time = time
        if time is not None:
            message = f"{message} (at t = {time:.6g})"
        super().__init__(message)


class TruncationError(CasimirKickError, RuntimeError):
    """Too much Fock-space population sits near the truncation edge."""

    def __init__(self, message, time=None, tail_mass=None):
        self.time = time
        self.tail_mass = tail_mass
        super().__init__(message)


class ConfigError(CasimirKickError):
    """A run configuration file could not be parsed or is invalid."""
