"""Exception hierarchy shared by every module of the package."""


class RieszFieldError(Exception):
    """Base class for all errors raised by :mod:`rieszfield`."""


class DomainError(RieszFieldError, ValueError):
    """An argument lies outside the domain where the operation is defined."""


class UnsupportedEndpointError(DomainError):
    """The operation has no density representation at ``s = d - 2``."""


class NumericError(RieszFieldError, ArithmeticError):
    """A numerical procedure failed to reach its target accuracy.

    ``diagnostics`` carries whatever the failing routine knew at the time
    (best estimate, achieved error, iteration counts).
    """

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class IntegrationError(NumericError):
    """Adaptive quadrature ran out of panels before meeting tolerance."""

    @property
    def estimate(self):
        return self.diagnostics.get("estimate")

    @property
    def error(self):
        return self.diagnostics.get("error")


class InternalConsistencyError(NumericError):
    """A quantity that is non-negative in exact arithmetic came out negative."""


class SingularBoundaryWarning(UserWarning):
    """At ``s = d - 2`` part of a balayage mass sits on the sphere ``|x| = R``."""
