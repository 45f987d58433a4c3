"""Exception hierarchy shared by every module of the package."""


class CoconvexError(Exception):
    """Base class for all errors raised by :mod:`coconvex`."""


# cone construction
class NotPointed(CoconvexError, ValueError):
    pass


class DegenerateCone(CoconvexError, ValueError):
    pass


class ZetaFailure(CoconvexError, ArithmeticError):
    pass


class NotUnit(CoconvexError, ValueError):
    pass


class NonPositiveT(CoconvexError, ValueError):
    pass


# polytope arithmetic
class Unbounded(CoconvexError, ValueError):
    pass


class Empty(CoconvexError, ValueError):
    pass


class LowDimensional(CoconvexError, ValueError):
    pass


class DimensionTooHigh(CoconvexError, ValueError):
    pass


# coconvex sets
class EmptyOmega(CoconvexError, ValueError):
    pass


class NonPositiveF(CoconvexError, ValueError):
    pass


class ZeroP(CoconvexError, ValueError):
    pass


class InternalGeometryError(CoconvexError, RuntimeError):
    pass


class ConeMismatch(CoconvexError, ValueError):
    pass


class BothZero(CoconvexError, ValueError):
    pass


class StepTooLarge(CoconvexError, ValueError):
    pass


# solver
class NotConverged(CoconvexError, RuntimeError):
    pass


class PEqualsN(CoconvexError, ValueError):
    pass


class EmptyMeasure(CoconvexError, ValueError):
    pass


class ZeroVolume(CoconvexError, RuntimeError):
    pass


# instance generation / io
class GenerationFailure(CoconvexError, RuntimeError):
    pass


class ParseError(CoconvexError, ValueError):
    pass


class SchemaError(CoconvexError, ValueError):
    pass


class UnsupportedPlotDimension(CoconvexError, ValueError):
    pass
