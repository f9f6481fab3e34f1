"""Exception types shared across the package.

Plain ``ValueError`` is used for malformed arguments; the classes here cover
conditions a caller may want to catch separately.
"""


class SuspflowError(Exception):
    """Base class for package-specific failures."""


class NonPrimitiveError(SuspflowError, ValueError):
    """Raised when an operation requires a primitive transition matrix."""


class NumericFailure(SuspflowError, RuntimeError):
    """An iterative routine did not converge or a certificate check failed."""


class ResourceLimit(SuspflowError, RuntimeError):
    """An exact enumeration would exceed the configured size guard."""
