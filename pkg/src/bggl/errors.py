"""Exception and warning types raised across the package."""


class BgglError(Exception):
    """Base class for all package errors."""


class DomainError(BgglError, ValueError):
    """An argument lies outside the domain of the function."""


class ConvergenceError(BgglError, ArithmeticError):
    """An iterative solver failed to reach its tolerance."""


class DegenerateSampleError(BgglError, ValueError):
    """The sample does not identify the requested estimate (e.g. all x equal)."""


class SampleTooSmallError(DegenerateSampleError):
    """Fewer observations than the estimator needs."""


class InfiniteInformationError(BgglError, ArithmeticError):
    """Fisher information has an infinite entry (shape alpha <= 1)."""


class DegenerateSampleWarning(UserWarning):
    """Estimates were returned, but some are not uniquely identified."""


class DataFormatError(BgglError, ValueError):
    """Input file is missing columns or holds unparsable values."""
