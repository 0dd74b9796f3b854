"""Exception hierarchy shared by every module."""


class RatDistError(Exception):
    """Base class for all library errors."""


class SingularCurve(RatDistError):
    pass


class PointNotOnCurve(RatDistError):
    pass


class SingularParams(RatDistError):
    pass


class ExcludedPoint(RatDistError):
    """The point is one of the exceptions of the quartic/cubic bijection."""


class NotOnQuartic(RatDistError):
    pass


class DegeneratePoint(RatDistError):
    """A quartic point whose line construction collapses (B undefined or B = O)."""


class SquareRootNotRational(RatDistError):
    pass


class ZeroInput(RatDistError, ValueError):
    pass


class ZeroDenominator(RatDistError, ZeroDivisionError):
    pass


class NotATriangle(RatDistError, ValueError):
    pass


class NotAParallelogram(RatDistError, ValueError):
    pass


class TorsionParams(RatDistError):
    """Induced family parameters give a generator of finite order."""
