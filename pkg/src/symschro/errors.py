"""Exception hierarchy shared by every module in the package."""


class SymSchroError(Exception):
    """Base class for all errors raised by symschro."""


class DomainError(SymSchroError, ValueError):
    """An argument lies outside the region where an operation is defined."""


class TrigOverflowError(SymSchroError, OverflowError):
    """A generalized trig value would exceed the representable range."""


class SeriesNotConvergedError(SymSchroError):
    pass


class ZeroAmplitudeError(DomainError):
    pass


class NoRealExponentError(DomainError):
    pass


class DegeneratePlaneError(DomainError):
    """The energy relation is undefined because delta is zero."""


class PlaneMismatchError(DomainError):
    pass


class SingularAmplitudeError(SymSchroError):
    """The amplitude (nearly) vanishes where an inverse power of it is needed."""


class IncompatibleSystemError(SymSchroError):
    pass


class GridError(DomainError):
    pass


class QuadratureError(SymSchroError):
    pass


class IntegrationError(SymSchroError):
    """Raised by the ODE integrator (singularity, step underflow, bad potential)."""
