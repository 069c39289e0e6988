"""Exception hierarchy shared by all modules."""


class UnlimitedSamplingError(Exception):
    """Base class for every error raised by this package."""


class DomainError(UnlimitedSamplingError, ValueError):
    """Input outside the function's domain (NaN, infinity)."""


class ParameterError(UnlimitedSamplingError, ValueError):
    """A scalar parameter is out of its allowed range."""


class LengthError(UnlimitedSamplingError, ValueError):
    """A sequence is too short (or empty) for the requested operation."""


class UndersampledError(ParameterError):
    """Sampling period too coarse for bandwidth pi reconstruction."""


class ConsistencyError(UnlimitedSamplingError, ValueError):
    """Data that should lie on the 2*lambda lattice does not."""


class ValidationError(ParameterError):
    """Base for recovery-parameter violations reported by ``validate``."""


class RateError(ValidationError):
    """Sampling period above the recovery limit 1/(2*pi*e)."""


class GridError(ValidationError):
    """beta_g is not a positive integer multiple of 2*lambda."""


class BoundError(ValidationError):
    """(T*pi*e)**N * beta_g >= lambda: the difference order is too low."""


class InsufficientSamplesError(ValidationError, LengthError):
    """Fewer than J + N + 1 samples."""
