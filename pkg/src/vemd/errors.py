"""Exception hierarchy for the decomposition package."""


class VemdError(Exception):
    """Base class for all errors raised by this package."""


class InvalidBaseError(VemdError, ValueError):
    pass


class EmptySetError(VemdError, ValueError):
    pass


class ShapeError(VemdError, ValueError):
    pass


class NormalizationError(VemdError, ValueError):
    pass


class TooShortError(VemdError, ValueError):
    pass


class BoundaryError(VemdError, ValueError):
    pass


class InvalidKnotsError(VemdError, ValueError):
    pass


class InsufficientExtremaError(VemdError):
    """Fewer than two maxima or minima; the direction cannot yield an envelope."""


class InconsistentConstraintsError(VemdError, ValueError):
    pass


class SingularSystemError(VemdError):
    """KKT factorization failed even after the regularized retry."""


class NoExtremaError(VemdError):
    """No projection direction produced a usable envelope pair."""


class UndefinedMetricError(VemdError, ValueError):
    pass


class SignalFileError(VemdError, ValueError):
    """Malformed or non-uniform signal CSV."""
