"""Exception types raised by the quantizer design code."""


class BREQuantError(Exception):
    """Base class for all package errors."""


class DomainError(BREQuantError, ValueError):
    """A prior or decision weight lies outside the admissible simplex."""


class ThresholdOrderError(BREQuantError):
    """The ternary closed-form risk was used with an empty middle decision region."""


class KinkError(BREQuantError):
    """Gradient requested too close to a threshold-clamp locus (strict mode only)."""


class BracketError(BREQuantError):
    """A root-finding bracket does not contain a sign change."""


class DegenerateError(BREQuantError):
    """Two decision weights are indistinguishable to the divergence."""


class ConvergenceError(BREQuantError):
    """An iterative solver exhausted its iteration budget."""


class OutOfImageError(BREQuantError):
    """A target gradient is not attained by any interior decision weight."""


class InsufficientDataError(BREQuantError):
    """Too few converged sweep entries to fit a slope."""
