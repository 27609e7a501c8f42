"""Exception hierarchy shared by all modules."""


class DevpoolError(Exception):
    """Base class for every error raised by the package."""


class InvalidInputError(DevpoolError, ValueError):
    """Input violates a documented precondition (shape, range, finiteness)."""


class EmptyInputError(InvalidInputError):
    """A reduction was asked to pool zero elements."""


class DegenerateWeightsError(InvalidInputError):
    """Weights sum to zero."""


class UndefinedCorrelationError(InvalidInputError):
    """Correlation requested for a constant sequence."""


class DecodeError(DevpoolError):
    """An image file could not be read or decoded."""


class ManifestError(DevpoolError):
    """A dataset manifest is malformed."""


class DatasetError(DevpoolError):
    """No usable entries remain in a dataset evaluation."""
