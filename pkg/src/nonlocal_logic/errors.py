"""Exception hierarchy shared by every module.

Validation-type failures map to CLI exit code 2, capacity failures to 3.
"""


class NonlocalLogicError(Exception):
    """Base class for all package errors."""


class ValidationError(NonlocalLogicError, ValueError):
    pass


class LabelCollisionError(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class ConfigurationError(ValidationError):
    pass


class BoundUndefinedError(ValidationError):
    pass


class UnavailableBoundError(ValidationError):
    pass


class CapacityError(NonlocalLogicError):
    """Requested dimension exceeds the dense-simulation caps."""


class NetlistError(ValidationError):
    """Netlist diagnostic with a stable code and a source position."""

    def __init__(self, code: str, message: str, line: int = 0, column: int = 0):
        self.code = code
        self.line = line
        self.column = column
        super().__init__(f"{line}:{column}: {code}: {message}")
