"""Exception types shared across the package."""


class BellSimError(Exception):
    """Base class for all package errors."""


class InconsistentDevice(BellSimError):
    """A click pattern is reachable from exactly one of two Bell states that must fail together."""


class InconsistentRun(BellSimError):
    """A logical Bell measurement produced both PhiMinus and PsiMinus outcomes."""


class ResourceBoundError(BellSimError):
    """The requested enumeration exceeds the supported size."""


class DomainError(BellSimError, ValueError):
    """An argument lies outside the domain of a closed-form expression."""


class DimensionMismatch(BellSimError, ValueError):
    """A state and a unitary disagree on the number of modes."""


class CircuitError(BellSimError, ValueError):
    """A circuit description could not be parsed or is inconsistent."""


class NoContraction(BellSimError):
    """Error rates fail to contract even at the smallest loss rate probed."""
