"""Exception and warning types shared across the package."""


class NativeKernelsError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(NativeKernelsError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class PoleError(DomainError):
    """Evaluation was requested exactly at (or too close to) a pole.

    Raised for gamma factors at non-positive integers and for
    hypergeometric denominator parameters that hit a non-positive
    integer before a terminating numerator can stop the series.
    """


class NonConvergenceError(NativeKernelsError):
    """An iterative evaluation failed to reach its target tolerance."""


class InvalidParameterError(NativeKernelsError, ValueError):
    """A parameter record violates the permissibility conditions."""


class RepresentationMismatchError(NativeKernelsError):
    """Independent representations of the same kernel disagree.

    This signals a numerical breakdown (or a bug) rather than a user
    error: the same value computed through two analytic routes moved
    apart by more than the cross-check tolerance.
    """


class ConditioningWarning(UserWarning):
    """Parameters sit close enough to a pole that accuracy degrades."""


class AccuracyWarning(UserWarning):
    """A result is returned but its accuracy target may not be met."""
