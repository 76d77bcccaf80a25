"""Exception hierarchy shared by every module of the package."""


class GeodSpecError(Exception):
    """Base class for all package errors."""


class ComplexError(GeodSpecError, ValueError):
    pass


class OutOfRangeVertex(ComplexError):
    pass


class DuplicateVertexInSimplex(ComplexError):
    pass


class WrongArity(ComplexError):
    pass


class MetricError(GeodSpecError, ValueError):
    pass


class MissingEdgeLength(MetricError):
    pass


class AsymmetricEdgeLength(MetricError):
    pass


class ExtraEdgeLength(MetricError):
    """An edge length was supplied for a pair that is not an edge of the complex."""


class NonRealizableSimplex(MetricError):
    """Gram determinant is clearly negative: the lengths violate the triangle inequality."""


class SingularGram(MetricError):
    """Gram determinant is (numerically) zero, so its inverse is undefined."""


class DegenerateSimplex(GeodSpecError, ValueError):
    pass


class MassNotPositiveDefinite(GeodSpecError, ValueError):
    pass


class ConvergenceFailure(GeodSpecError, RuntimeError):
    def __init__(self, message: str, max_iterations: int | None = None,
                 worst_residual: float | None = None):
        super().__init__(message)
        self.max_iterations = max_iterations
        self.worst_residual = worst_residual


class GridTooCoarse(GeodSpecError, ValueError):
    pass


class IndexOutOfRange(GeodSpecError, IndexError):
    pass


class InsufficientEigenvalues(GeodSpecError, ValueError):
    pass


class EmptyCluster(GeodSpecError, ValueError):
    pass


class DegenerateMap(GeodSpecError, ValueError):
    pass


class ParseError(GeodSpecError, ValueError):
    def __init__(self, message: str, line: int | None = None, offset: int | None = None):
        super().__init__(message)
        self.line = line
        self.offset = offset


class ValidationError(GeodSpecError, ValueError):
    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report
