"""Exception and warning types shared across the package.

The CLI maps exceptions to exit codes through the ``exit_code`` class
attribute: 2 for misuse of the API or command line, 3 for bad input data,
4 for numerical failures.
"""


class ShapeDictError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class UsageError(ShapeDictError):
    """Invalid arguments: dimension or metric mismatch, bad parameters."""

    exit_code = 2


class MetricMismatchError(UsageError):
    """Operands belong to different configuration-space metrics."""


class DataError(ShapeDictError):
    """Input data cannot be used: malformed files, inconsistent sizes."""

    exit_code = 3


class FormatError(DataError):
    """A serialized artifact violates its schema; message carries the location."""


class DatasetTooSmallError(DataError):
    """The dataset has fewer usable elements than the operation requires."""


class NumericalError(ShapeDictError):
    """A numerical precondition failed at run time."""

    exit_code = 4


class DegenerateConfigurationError(NumericalError):
    """The configuration collapses to a point and has no shape."""


class NotPositiveDefiniteError(NumericalError):
    """A metric matrix is not positive-definite within tolerance."""


class SingularSubsetError(NumericalError):
    """Selected atoms are numerically linearly dependent."""


class NonUniqueGeodesicError(NumericalError):
    """No unique shortest geodesic exists between the given shapes."""


class NonUniqueMeanWarning(UserWarning):
    """The mean shape is not unique (tied leading eigenvalues)."""


class NonUniqueGeodesicWarning(UserWarning):
    """Endpoints are maximally distant; the returned geodesic is one of many."""
