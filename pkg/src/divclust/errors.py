"""Exception hierarchy shared by the solvers and the CLI."""


class DivClustError(Exception):
    """Base class for all library errors."""


class InstanceError(DivClustError, ValueError):
    """Malformed or inconsistent instance data."""


class InfeasibleInstance(DivClustError):
    """Some color class exceeds ``floor(n / l)``, so no valid clustering exists."""


class ExhaustedThresholds(DivClustError):
    """Every candidate threshold was rejected.

    The solvers are guaranteed to succeed at the optimal diameter, so this
    signals a bug rather than a property of the input.
    """


class InvariantViolation(DivClustError, AssertionError):
    """An internal algorithm invariant failed."""


class TooLarge(DivClustError):
    """Instance exceeds the exact oracle's size limit."""


class UnequalClassSizes(InfeasibleInstance):
    """Two-color instance whose color classes differ in size."""


class MoreThanTwoColors(DivClustError, ValueError):
    """Two-color solver called on an instance with three or more colors."""


class InvalidMatching(DivClustError, ValueError):
    """Warm-start matching is not a matching of the given bipartite graph."""
