"""Exception types shared across the package."""


class GrowthLabError(Exception):
    """Base class for all package errors."""


class CapExceeded(GrowthLabError):
    """An expanded symbol string went past the global length cap.

    ``depth`` carries the first offending recursion depth when known.
    """

    def __init__(self, message, depth=None):
        super().__init__(message)
        self.depth = depth


class NotAForwardSymbol(GrowthLabError):
    """Tried to toggle a position that is not an F or G symbol."""


class EmptyTrajectory(GrowthLabError):
    """A trajectory operation needs at least one segment."""


class DimensionMismatch(GrowthLabError):
    """Two image grids have different shapes."""


class InsufficientData(GrowthLabError):
    """Not enough calibration data for a fit."""


class EmptyImage(GrowthLabError):
    """A binary image has no black pixels where some are required."""


class NotInSupport(GrowthLabError):
    """The grammar cannot derive the given L-system."""


class SupportTooLarge(GrowthLabError):
    """Exhaustive enumeration would produce too many hypotheses."""


class RejectionLimitExceeded(GrowthLabError):
    """Constrained sampling failed too many times in a row.

    ``constraint`` names the check that kept failing, when known.
    """

    def __init__(self, message, constraint=None):
        super().__init__(message)
        self.constraint = constraint


class DegenerateDistractor(GrowthLabError):
    """A distractor render collides pixel-for-pixel with another candidate."""


class TooManySegments(GrowthLabError):
    """A generation display has more segments than the configured bound."""


class TooFewSegments(GrowthLabError):
    """A generation display has fewer segments than the configured bound."""
