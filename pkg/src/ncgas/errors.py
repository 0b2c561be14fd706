"""Exception and warning types shared across the package."""


class NcgasError(Exception):
    """Base class for all package errors."""


class DomainError(NcgasError, ValueError):
    """An argument lies outside the domain where a formula is defined."""


class NoIntersectionError(DomainError):
    """The Fermi line misses the band of allowed single-particle energies."""


class KinkError(DomainError):
    """A derivative was requested exactly on a non-analytic locus."""


class TruncationError(NcgasError, ValueError):
    """A truncated spectral sum does not meet its tail bound."""


class SpectrumError(NcgasError, RuntimeError):
    """The zero-finding backend failed."""


class SolverError(NcgasError, RuntimeError):
    """A root solve did not converge.

    ``best_residual`` is the smallest residual norm reached and ``trace``
    holds ``(x, residual_norm)`` for each accepted iterate.
    """

    def __init__(self, message, best_x=None, best_residual=None, trace=()):
        super().__init__(message)
        self.best_x = best_x
        self.best_residual = best_residual
        self.trace = list(trace)


class QuadratureError(NcgasError, RuntimeError):
    """Adaptive quadrature failed to reach its tolerance."""

    def __init__(self, message, estimate=None, error_bound=None):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


class SommerfeldAccuracyWarning(UserWarning):
    """The low-temperature expansion is being used at small ``b``."""


class RegimeWarning(UserWarning):
    """An asymptotic formula is evaluated outside its intended regime."""
