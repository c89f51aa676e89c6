"""Exception types shared across the package."""


class SecrateError(Exception):
    """Base class for every error raised by this package."""


class DomainError(SecrateError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class DegenerateParameterError(SecrateError, ValueError):
    """A parameter combination makes a closed form singular (P=0 or P2=0 corners)."""


class SingularityError(SecrateError, ArithmeticError):
    """A covariance block is numerically singular beyond jitter repair."""


class CoincidentNodesError(SecrateError, ValueError):
    """Two network nodes share a position, so a path-loss gain is undefined."""
