"""Exception hierarchy.

Every domain failure raised by the library derives from :class:`GrassError`,
which the CLI maps to exit code 2.
"""


class GrassError(Exception):
    """Base class for domain errors."""


class ShapeMismatch(GrassError, ValueError):
    pass


class SingularMatrix(GrassError, ArithmeticError):
    pass


class ZeroPolynomial(GrassError, ValueError):
    pass


class ZeroMatrix(GrassError, ValueError):
    pass


class DimensionMismatch(GrassError, ValueError):
    pass


class NotAGrassmannPoint(GrassError, ValueError):
    pass


class DependentSpan(GrassError, ValueError):
    pass


class DegeneratePointSet(GrassError, ValueError):
    pass


class PreconditionViolation(GrassError, ValueError):
    pass


class VerticalLine(GrassError, ValueError):
    pass


class VerticalHyperplane(GrassError, ValueError):
    pass


class ParallelPlanes(GrassError, ValueError):
    pass


class IdenticalPlanes(GrassError, ValueError):
    pass


class BudgetExhausted(GrassError, RuntimeError):
    pass


class NotCovered(GrassError, LookupError):
    pass


class InsufficientScales(GrassError, ValueError):
    pass
