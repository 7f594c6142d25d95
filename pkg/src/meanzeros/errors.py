"""Exception types shared across the package."""


class DimensionMismatchError(ValueError):
    """Bodies or vectors do not live in a common ambient dimension."""


class AnalyticUnavailableError(ValueError):
    """No closed-form volume exists for the requested body."""


class BadFrameError(ValueError):
    """A supplied subspace basis is not orthonormal."""


class NotEvenError(ValueError):
    """A gauge expansion contains odd-frequency terms."""


class NotInRangeError(ValueError):
    """A gauge is not in the image of the cosine transform."""


class DegenerateSpaceError(ValueError):
    """A function-space basis is linearly dependent."""


class ValueConditionError(ValueError):
    """Every basis function vanishes at some point of the manifold."""


class NotSmoothError(ValueError):
    """A smooth (positive-definite) body is required."""


class EmptyRegionError(ValueError):
    """A sampling region has an empty or unbounded interior."""


class BadEigenvalueError(ValueError):
    """A Laplace eigenvalue must be positive."""


class UnreliableOracleError(RuntimeError):
    """Too many Monte Carlo samples failed the reliability checks."""
