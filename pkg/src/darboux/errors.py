"""Exception hierarchy shared by all modules."""


class DarbouxError(Exception):
    """Base class for every error raised by the package."""


class DomainError(DarbouxError, ValueError):
    """Point or argument outside the domain of a formula."""


class InvalidObservable(DarbouxError, ValueError):
    """Observable undefined for the requested model."""


class ModelMismatch(DarbouxError, ValueError):
    """Relation or workflow requires a different potential variant."""


class ZeroObservable(DarbouxError, ValueError):
    """All coefficients of a quadratic integral vanish."""


class NoConvergence(DarbouxError, RuntimeError):
    """Iterative solver failed to reach its tolerance."""


class DomainExit(DarbouxError, RuntimeError):
    """A trajectory left the manifold u > 0."""


class ChartSingular(DarbouxError, ValueError):
    """Chart Jacobian loses rank at the requested point."""


class DegenerateRoots(DarbouxError, ValueError):
    """Characteristic roots coincide."""


class IncompatibleChart(DarbouxError, ValueError):
    """Chart does not separate the given model."""


class UnsupportedOrder(DarbouxError, ValueError):
    """Special-function order outside the supported range."""


class PoleInB(DarbouxError, ValueError):
    """Lower parameter of 1F1 is a nonpositive integer."""


class RangeError(DarbouxError, OverflowError):
    """Special-function argument outside the supported box or value out of double range."""


class JetOrderExceeded(DarbouxError, ValueError):
    """Jet evaluation would require more than the maximal order."""


class NotBracketed(DarbouxError, RuntimeError):
    """Root or eigenvalue could not be bracketed."""


class NodeMismatch(DarbouxError, RuntimeError):
    """Eigenfunction node count disagrees with the requested level."""


class SpectrumUnbounded(DarbouxError, ValueError):
    """Separated problem has no decaying channel (no discrete spectrum)."""


class UsageError(DarbouxError, ValueError):
    """Invalid command-line usage."""
