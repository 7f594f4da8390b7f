"""Exception types shared across the toolkit.

All configuration and input problems are ValueError subclasses so callers can
catch broadly; numerical breakdowns derive from ArithmeticError.
"""


class DomainError(ValueError):
    """An input value lies outside the mathematical domain of an operation."""


class ParameterError(ValueError):
    """A parameter (shape, dimension, probability, ...) is invalid."""


class DimensionError(ValueError):
    """Vector or matrix dimensions do not match."""


class NumericError(ArithmeticError):
    """A numerical routine failed to converge or produced a non-finite value."""


class UnknownProblemError(ValueError):
    """A problem identifier does not name a known benchmark problem."""


class ConfigError(ValueError):
    """An experiment configuration is malformed or inconsistent."""


class DegenerateNormalizationError(ValueError):
    """Pooled objective extrema have zero extent in some objective."""


class DegenerateBaseError(ValueError):
    """A relative-hypervolume base value is zero or negative."""


class ReportError(ValueError):
    """A report cannot be assembled from the available run data."""
