"""
Exception types for golflab.

Value problems subclass ValueError so callers that only know the builtin
still catch them.
"""


class GolfLabError(Exception):
    """Base class for every error raised by golflab."""


class ParameterError(GolfLabError, ValueError):
    """A parameter violates a precondition (sizes, parity, sums, surplus)."""


class DomainError(ParameterError):
    """A real-valued argument lies outside the domain of a formula."""


class EmptySetError(ParameterError):
    """An operation that needs a nonempty vertex set received an empty one."""


class MalformedPathError(ParameterError):
    """A lattice path does not satisfy the passage condition it was declared with."""


class DegenerateInputError(ParameterError):
    """Statistical routine received counts or probabilities it cannot test."""


class InstanceTooLargeError(GolfLabError):
    """An exact enumeration was asked for an instance above its guard."""


class UnsupportedStrategyError(GolfLabError):
    """The strategy has no exact rational resolution law."""


class NoSeparatorError(GolfLabError):
    """A line window holds fewer than two certified separators."""


class WalkDivergenceError(GolfLabError, RuntimeError):
    """A simulated walk exceeded the step bound."""


class SeparatorFilledError(GolfLabError, AssertionError):
    """A walk entered a vertex that must stay free (a remaining hole or a separator)."""


class ConfigurationError(GolfLabError):
    """Environment settings or a stored manifest could not be used."""
