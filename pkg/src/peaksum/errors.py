"""Exception hierarchy for peaksum.

Every failure mode raised by the library derives from :class:`PeaksumError`
so callers can catch the whole family at once.  The CLI maps subfamilies to
exit codes (input errors -> 2, numerical failures -> 3, caustics -> 4).
"""

from __future__ import annotations


class PeaksumError(Exception):
    """Base class for all peaksum errors."""


class InputError(PeaksumError):
    """Malformed user input (bad JSON, invalid parameters, broken invariants)."""


class NonSummable(PeaksumError):
    """Series terms failed to decay within the iteration cap."""


class EmptyDomain(InputError):
    """Every grid point of the series maps to an infinite exponent."""


class NonIntegrable(PeaksumError):
    """No convergent tail bound could be established for the integral."""


class DomainError(InputError):
    """Function evaluated outside the domain required by the operation."""


class NomeOutOfRange(InputError):
    """Jacobi theta nome with \\|q\\| >= 1."""


class DegenerateMinimum(PeaksumError):
    """Minimum violates the non-degeneracy hypotheses (flat or wrong-sided)."""


class NonUniqueMinimum(PeaksumError):
    """Two global minima tie within tolerance."""


class OrderUnavailable(InputError):
    """Expansion order requires derivatives that are not available."""


class NotMonotone(PeaksumError):
    """Derivative expected to be monotone was found non-monotone."""


class ToleranceExceeded(PeaksumError):
    """An integration drifted past its accuracy contract."""


class InvalidDistribution(InputError):
    """Probability vector violating nonnegativity/normalization."""


class IntegrationFailure(PeaksumError):
    """ODE solver failed (step-size collapse or non-convergence)."""


class HypothesisViolated(PeaksumError):
    """Field does not satisfy the hypotheses of the asymptotic formula."""


class CausticFormed(PeaksumError):
    """Characteristics crossed before the requested time.

    Carries the field evolved up to the largest safe time reached, together
    with that time, so callers can still inspect the partial result.
    """

    def __init__(self, message: str, field=None, safe_time: float | None = None):
        super().__init__(message)
        self.field = field
        self.safe_time = safe_time
