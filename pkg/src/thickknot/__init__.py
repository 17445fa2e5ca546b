"""Numerical toolkit for curvature-constrained space curves with tube thickness.

Curves are polylines normalised so the minimum turning radius is 1; the
package measures their thickness (doubly-critical self-distance capped at
2), tightens tubes under the constraints, synthesises planar curvature-
bounded caps, builds the locked double-overhand unknot family, and
evaluates the geometric obstruction diagnostics (aperture contour, cone
angle, near-contact area) that witness why such tubes cannot be untangled.
"""

from .curve import (
    Configuration,
    DiscreteCurve,
    GeometricReport,
    diameter,
    discrete_curvature,
    length,
    perturb,
    resample,
    tangents,
)
from .dubins import DubinsPath, DubinsSegment, close_open_curve, derive_cap_configurations, solve_dubins
from .errors import *  # noqa: F401,F403 - small, explicit hierarchy
from .fileio import IsotopyTrace, export_mesh, read_curve, read_trace, write_curve, write_trace
from .sono import (
    TightenConfig,
    TightenResult,
    control_curvature,
    detect_overlaps,
    remove_overlaps,
    shrink_step,
    tighten,
    tighten_open,
)
from .thickness import (
    DoublyCriticalPair,
    MembershipVerdict,
    check_membership,
    doubly_critical_pairs,
    geometric_report,
    r2,
    reach_at,
    thickness,
)
from .constructions import (
    FramedCurve,
    SegmentLabel,
    build_locked_unknot,
    build_stacked_unknot,
    classify_segments,
    closed_trefoil,
    doubled_core,
    framed,
    open_overhand,
    round_circle,
    stadium,
    unconstrained_unknot_check,
)

__version__ = "0.1.0"
