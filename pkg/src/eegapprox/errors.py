class EegApproxError(Exception):
    """Base class for every error raised by this package."""


class ParseError(EegApproxError, ValueError):
    pass


class StructureError(EegApproxError, ValueError):
    pass


class EmptyInputError(EegApproxError, ValueError):
    pass


class UnknownChannelError(EegApproxError, LookupError):
    def __init__(self, name):
        super().__init__(f"unknown channel {name}")
        self.name = name

    def __str__(self):
        return self.args[0]


class DomainError(EegApproxError, ValueError):
    pass


class AliasingError(DomainError):
    pass


class InsufficientDataError(EegApproxError, ValueError):
    pass


class InsufficientMeasurementError(EegApproxError, RuntimeError):
    """Too few heartbeats fired for the throughput figure to mean anything."""
