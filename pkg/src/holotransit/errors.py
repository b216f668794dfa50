"""Exception hierarchy shared by all modules."""


class HoloTransitError(Exception):
    """Base class for every error raised by the package."""


class GeometryError(HoloTransitError):
    pass


class PointOnCurve(GeometryError):
    def __init__(self, point, distance):
        super().__init__(f"point {point!r} lies within {distance:.3g} of the curve")
        self.point = point
        self.distance = distance


class DegenerateCurve(GeometryError):
    pass


class DegenerateHole(GeometryError):
    pass


class InvalidPolyline(GeometryError):
    pass


class InvalidRegion(GeometryError):
    pass


class PoleHit(HoloTransitError):
    def __init__(self, message, step=None):
        super().__init__(message if step is None else f"{message} (iterate step {step})")
        self.step = step


class InvalidMap(HoloTransitError):
    pass


class InvalidDomain(HoloTransitError):
    pass


class InsufficientTopology(HoloTransitError):
    pass


class MarginCollapse(HoloTransitError):
    pass


class RefinementBudgetExceeded(HoloTransitError):
    pass


class OrientationLost(HoloTransitError):
    pass


class ZeroOnContour(HoloTransitError):
    pass


class NonIntegerResidual(HoloTransitError):
    def __init__(self, residual, message="argument increment is not close to an integer"):
        super().__init__(f"{message} (residual {residual:.3g})")
        self.residual = residual


class HorizonTooSmall(HoloTransitError):
    pass


class HypothesisViolation(HoloTransitError):
    pass


class PreconditionViolation(HoloTransitError):
    pass


class IllConditioned(HoloTransitError):
    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class ParseError(HoloTransitError):
    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class ValidationError(HoloTransitError):
    def __init__(self, field, message=""):
        super().__init__(f"{field}: {message}" if message else field)
        self.field = field
