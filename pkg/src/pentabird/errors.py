"""Exception hierarchy.

Every error carries enough context (usually a vertex index) to locate the
failure.  The CLI maps the three top-level families onto exit codes.
"""


class PentabirdError(Exception):
    """Base class for all library errors."""


class ParamError(PentabirdError, ValueError):
    """Invalid parameters (exit code 3)."""


class DegeneracyError(PentabirdError, ArithmeticError):
    """A geometric construction hit a degenerate configuration (exit code 4)."""

    def __init__(self, message="", index=None):
        if index is not None:
            message = f"{message} (index {index})"
        super().__init__(message)
        self.index = index


class ParseError(PentabirdError, ValueError):
    """Malformed input file (exit code 2)."""


# parameter errors

class BadN(ParamError):
    pass


class NotCoprime(ParamError):
    pass


class WrongN(ParamError):
    pass


class InsufficientLayers(ParamError):
    pass


class PathStartNotRegular(ParamError):
    pass


# degeneracies

class DegenerateJoin(DegeneracyError):
    pass


class DegenerateMeet(DegeneracyError):
    pass


class DegenerateDiagonal(DegeneracyError):
    pass


class CrossRatioPole(DegeneracyError):
    pass


class NotConcurrent(DegeneracyError):
    pass


class CoincidentLines(DegeneracyError):
    pass


class DegenerateInertia(DegeneracyError):
    pass


class NotEmbedded(DegeneracyError):
    pass


class PointOnBoundary(DegeneracyError):
    pass


class RankDeficient(DegeneracyError):
    pass


class ZeroCoefficient(DegeneracyError):
    pass


class SampleDegenerate(DegeneracyError):
    pass


class EmptyRegion(DegeneracyError):
    pass


class DegenerateTriple(DegeneracyError):
    pass


class NoConvergence(DegeneracyError):
    """Iteration stopped before reaching the requested tolerance."""
