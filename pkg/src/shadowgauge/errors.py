"""Exception hierarchy shared by all shadowgauge modules."""


class GeometryError(ValueError):
    """Base class for invalid geometric input."""


class DimensionMismatchError(GeometryError):
    pass


class DegenerateBodyError(GeometryError):
    """Raised when a zonotope does not span its ambient space."""


class UnsupportedMeasureError(GeometryError):
    """Raised when an operation needs a discrete surface area measure."""


class InconsistentMeasureError(GeometryError):
    """Raised when atoms violate origin symmetry or Minkowski balance."""


class GeneratorCapError(GeometryError):
    pass


class EvaluationError(ArithmeticError):
    """Raised when an objective returns a non-finite value."""
