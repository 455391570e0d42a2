"""Exception hierarchy for smoothtrim."""


class SmoothTrimError(Exception):
    """Base class for all errors raised by the package."""


class ParameterDomainError(SmoothTrimError, ValueError):
    """A parameter lies outside its admissible domain."""


class OverTrimError(ParameterDomainError):
    """Trimming would discard every observation."""


class DegenerateError(SmoothTrimError, ArithmeticError):
    """A quantity that must be positive came out zero (constant data, empty weights)."""


class DegenerateWeightsError(DegenerateError):
    """Every discrete weight is zero for the requested sample size."""


class ResolutionError(ParameterDomainError):
    """The sample is too small to separate the trimming and smoothing indices."""


class NoRootError(SmoothTrimError, ArithmeticError):
    """The Lagrange multiplier equation has no root on the admissible interval."""


class MuOutOfRangeError(NoRootError):
    """The hypothesised mean lies outside the convex hull of the weighted data."""


class QuadratureError(SmoothTrimError, ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class ScaleMismatchError(SmoothTrimError, ValueError):
    """A functional-level variance was used where an estimator-level one is needed."""


class StudyError(SmoothTrimError, RuntimeError):
    """A Monte Carlo study cell exceeded its failure budget."""
