"""Exception hierarchy. Every domain failure derives from ThickknotError so the
CLI can map it to a nonzero exit code without special-casing."""


class ThickknotError(Exception):
    """Base class for all domain errors raised by this package."""


class DegenerateCurve(ThickknotError):
    """Curve has no usable geometry (zero length, coincident points)."""


class NotAKnot(ThickknotError):
    """Operation requires a closed curve."""


class NonPlanarInput(ThickknotError):
    """Endpoint data does not lie in a common plane."""


class Infeasible(ThickknotError):
    """No admissible path/configuration exists for the given data."""


class CapCollision(ThickknotError):
    """Synthesised cap would intersect the core tube."""


class OverlapStuck(ThickknotError):
    """Overlap removal failed to resolve all penetrations."""


class InfeasibleStart(ThickknotError):
    """Tightening pre-repair could not reach an admissible state."""


class InfeasibleSeed(ThickknotError):
    """Constructed seed curve violates its own feasibility checks."""


class OffsetCurvatureViolation(ThickknotError):
    """Offset strand exceeds the curvature bound.

    Carries ``indices`` (offending vertex indices) and ``max_curvature``.
    """

    def __init__(self, message, indices=(), max_curvature=float("nan")):
        super().__init__(message)
        self.indices = tuple(indices)
        self.max_curvature = max_curvature


class PreconditionViolated(ThickknotError):
    """Input does not satisfy a documented precondition."""


class NoAperture(ThickknotError):
    """No bounded aperture contour exists for the given plane."""


class EmptyTrace(ThickknotError):
    """Trace contains no frames."""


class NoTube(ThickknotError):
    """Operation requires a positive tube radius."""
