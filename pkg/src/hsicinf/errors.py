"""Exception types raised by hsicinf."""


class HSICInfError(ValueError):
    """Base class for all hsicinf errors."""


class DataError(HSICInfError):
    """Malformed or inconsistent input data."""


class InsufficientSamplesError(DataError):
    """Too few samples to form the requested blocks or splits."""


class NumericalError(HSICInfError):
    """A computation could not be carried out to usable precision."""


class PrecisionError(NumericalError):
    """Truncated-normal interval mass underflowed to zero."""


class DegenerateCovarianceError(NumericalError):
    """The score covariance is not positive definite.

    ``features`` lists the offending (zero-variance) feature indices, or every
    index when the failure cannot be attributed to single features.
    """

    def __init__(self, message, features=()):
        super().__init__(message)
        self.features = tuple(int(i) for i in features)


class InfeasibleConstraintError(NumericalError):
    """A non-truncating selection constraint is violated by the observed scores."""
