"""Tube thickness via doubly critical chords.

The thickness of a curve is min(2, r2), where r2 is the smallest distance
between pairs of points whose connecting chord is orthogonal to the tangent
at both ends.  On polylines we accept pairs whose orthogonality residual
(max |cos| of the two chord/tangent angles) is below a tolerance, exclude
pairs that are close along the curve, and keep local minima of the chord
length within that admissible set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .curve import DiscreteCurve, GeometricReport, diameter, discrete_curvature, length, tangents
from .errors import NotAKnot

__all__ = [
    "DoublyCriticalPair",
    "MembershipVerdict",
    "doubly_critical_pairs",
    "r2",
    "thickness",
    "reach_at",
    "check_membership",
    "geometric_report",
    "exclusion_window",
]

#: default orthogonality tolerance for doubly critical chords
ORTHO_TOL = 0.05
#: default curvature slack in membership checks
CURVATURE_TOL = 0.02
#: default thickness slack in membership checks
THICKNESS_TOL = 0.02
#: fraction of the nominal window pi*max(r, h) actually excluded; the
#: shortfall keeps exactly-antipodal pairs (arc separation == window) from
#: being dropped to floating noise or a single shrink step
WINDOW_SLACK = 0.99


def exclusion_window(curve: DiscreteCurve, slack: float = WINDOW_SLACK) -> float:
    """Arc-length separation below which chords are ignored.

    Within pi*max(r, h) of arc length a curvature-1 curve cannot come closer
    than its tube diameter, so nothing real is lost.
    """
    return slack * math.pi * max(curve.tube_radius, curve.h)


@dataclass(frozen=True)
class DoublyCriticalPair:
    """Near-orthogonal chord that is locally shortest among admissible pairs.

    ``at_window_boundary`` marks pairs whose chord-length neighbourhood was
    cut off by the arc-length exclusion window rather than by geometry;
    these are discretisation artifacts worth eyeballing, not dropping.
    """

    index_a: int
    index_b: int
    chord_length: float
    orthogonality_residual: float
    at_window_boundary: bool = False


@dataclass(frozen=True)
class MembershipVerdict:
    """Outcome of testing a curve against the thickness-tau admissibility."""

    tau: float
    is_member: bool
    max_curvature: float
    thickness: float
    reasons: tuple = ()
    unknottedness: str = "assumed"


def _component_ids(curve: DiscreteCurve) -> np.ndarray:
    ids = np.empty(curve.n, dtype=int)
    for k, (lo, hi) in enumerate(curve.component_slices()):
        ids[lo:hi] = k
    return ids


def _arc_separation(curve: DiscreteCurve):
    """(s, L, comp) arrays for pairwise arc-length separation tests."""
    s = curve.arc_positions()
    comp = _component_ids(curve)
    if curve.closed:
        total = length(curve)
    else:
        total = math.inf
    return s, total, comp


def doubly_critical_pairs(
    curve: DiscreteCurve,
    ortho_tol: float = ORTHO_TOL,
    window: float | None = None,
) -> list[DoublyCriticalPair]:
    """All admissible locally-shortest near-orthogonal chords, ascending.

    A pair (i, j) is admissible when its orthogonality residual is at most
    ``ortho_tol`` and its arc-length separation along the curve is at least
    ``window`` (pairs on different strands are always separated).  Among
    admissible pairs, local minima of the chord length over the 8 index
    neighbours are kept; ties count, so plateaus survive.
    """
    pts = curve.points
    n = curve.n
    if n < 2:
        return []
    tang = tangents(curve)
    s, total, comp = _arc_separation(curve)
    w = exclusion_window(curve) if window is None else window

    slices = curve.component_slices()
    comp_lo = np.empty(n, dtype=int)
    comp_hi = np.empty(n, dtype=int)
    for lo, hi in slices:
        comp_lo[lo:hi] = lo
        comp_hi[lo:hi] = hi

    admissible = {}
    at_boundary = set()
    block = 512
    for i0 in range(0, n, block):
        i1 = min(n, i0 + block)
        diff = pts[None, :, :] - pts[i0:i1, None, :]
        dist = np.linalg.norm(diff, axis=2)
        with np.errstate(invalid="ignore", divide="ignore"):
            dot_i = np.abs(np.einsum("ijk,ik->ij", diff, tang[i0:i1])) / dist
            dot_j = np.abs(np.einsum("ijk,jk->ij", diff, tang)) / dist
        res = np.maximum(dot_i, dot_j)
        sep = np.abs(s[None, :] - s[i0:i1, None])
        if curve.closed:
            sep = np.minimum(sep, total - sep)
        same = comp[None, :] == comp[i0:i1, None]
        sep = np.where(same, sep, np.inf)
        jj, ii = np.meshgrid(np.arange(n), np.arange(i0, i1))
        mask = (jj > ii) & (sep >= w) & (res <= ortho_tol) & (dist > 0)
        for i, j in zip(ii[mask], jj[mask]):
            admissible[(int(i), int(j))] = (
                float(dist[i - i0, j]),
                float(res[i - i0, j]),
            )
            if sep[i - i0, j] - w < 2.0 * curve.h:
                at_boundary.add((int(i), int(j)))

    def neighbour_index(k, step):
        lo, hi = comp_lo[k], comp_hi[k]
        k2 = k + step
        if curve.closed:
            return lo + (k2 - lo) % (hi - lo)
        return k2 if lo <= k2 < hi else None

    def neighbour_chord(i, j, di, dj):
        i2 = neighbour_index(i, di) if di else i
        j2 = neighbour_index(j, dj) if dj else j
        if i2 is None or j2 is None or i2 == j2:
            return math.inf
        key = (i2, j2) if i2 < j2 else (j2, i2)
        entry = admissible.get(key)
        return entry[0] if entry is not None else math.inf

    pairs = []
    offsets = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)]
    for (i, j), (d, res) in admissible.items():
        if all(d <= neighbour_chord(i, j, di, dj) for di, dj in offsets):
            pairs.append(
                DoublyCriticalPair(i, j, d, res, at_window_boundary=(i, j) in at_boundary)
            )
    pairs.sort(key=lambda p: (p.chord_length, p.index_a, p.index_b))
    return pairs


def r2(curve: DiscreteCurve, ortho_tol: float = ORTHO_TOL, window: float | None = None) -> float:
    """Minimal doubly-critical chord length; +infinity when none exist."""
    pairs = doubly_critical_pairs(curve, ortho_tol=ortho_tol, window=window)
    return pairs[0].chord_length if pairs else math.inf


def thickness(curve: DiscreteCurve, ortho_tol: float = ORTHO_TOL, window: float | None = None) -> float:
    """Thickness: min(2, r2)."""
    return min(2.0, r2(curve, ortho_tol=ortho_tol, window=window))


def _segment_endpoints(curve: DiscreteCurve):
    starts, ends = [], []
    for lo, hi in curve.component_slices():
        pts = curve.points[lo:hi]
        starts.append(pts[:-1])
        ends.append(pts[1:])
        if curve.closed:
            starts.append(pts[-1:])
            ends.append(pts[:1])
    return np.vstack(starts), np.vstack(ends)


def distance_to_centerline(curve: DiscreteCurve, points) -> np.ndarray:
    """Distance from query points (m, 3) to the polyline (segments, exact)."""
    q = np.atleast_2d(np.asarray(points, dtype=float))
    a, b = _segment_endpoints(curve)
    ab = b - a
    denom = np.einsum("ij,ij->i", ab, ab)
    out = np.empty(len(q))
    block = 256
    for k0 in range(0, len(q), block):
        chunk = q[k0 : k0 + block]
        ap = chunk[:, None, :] - a[None, :, :]
        t = np.einsum("ijk,jk->ij", ap, ab) / denom[None, :]
        t = np.clip(t, 0.0, 1.0)
        closest = a[None, :, :] + t[:, :, None] * ab[None, :, :]
        d = np.linalg.norm(chunk[:, None, :] - closest, axis=2)
        out[k0 : k0 + block] = d.min(axis=1)
    return out


def reach_at(curve: DiscreteCurve, query_point) -> float:
    """Distance from a point to the tube surface (0 inside the tube)."""
    d = float(distance_to_centerline(curve, query_point)[0])
    return max(0.0, d - curve.tube_radius)


def check_membership(
    curve: DiscreteCurve,
    tau: float,
    curvature_tol: float = CURVATURE_TOL,
    thickness_tol: float = THICKNESS_TOL,
    unknot_checker=None,
) -> MembershipVerdict:
    """Test admissibility at tube diameter ``tau``.

    Membership demands a closed curve, max curvature at most 1 plus the
    curvature tolerance, and thickness at least tau minus the thickness
    tolerance.  Unknottedness is assumed unless a checker callable is
    supplied (see constructions.unconstrained_unknot_check); the verdict
    records which.
    """
    if not 0.0 <= tau <= 2.0:
        raise ValueError(f"tau must lie in [0, 2], got {tau}")
    if not curve.closed:
        raise NotAKnot("membership is defined for closed curves only")
    kappa = discrete_curvature(curve)
    max_kappa = float(kappa.max()) if kappa.size else 0.0
    thick = thickness(curve)
    reasons = []
    if max_kappa > 1.0 + curvature_tol:
        reasons.append(f"curvature: max {max_kappa:.4f} exceeds 1+{curvature_tol}")
    if thick < tau - thickness_tol:
        reasons.append(f"thickness: {thick:.4f} below tau-{thickness_tol}")
    unknottedness = "assumed"
    if unknot_checker is not None:
        verdict = unknot_checker(curve)
        unknottedness = f"checked-heuristically:{verdict}"
        if verdict == "nontrivial":
            reasons.append("knotted: heuristic check returned nontrivial")
    return MembershipVerdict(
        tau=float(tau),
        is_member=not reasons,
        max_curvature=max_kappa,
        thickness=thick,
        reasons=tuple(reasons),
        unknottedness=unknottedness,
    )


def geometric_report(curve: DiscreteCurve) -> GeometricReport:
    """Measure length, curvature, r2, thickness and diameter in one pass."""
    kappa = discrete_curvature(curve)
    r2_val = r2(curve)
    return GeometricReport(
        length=length(curve),
        max_curvature=float(kappa.max()) if kappa.size else 0.0,
        r2=r2_val,
        thickness=min(2.0, r2_val),
        diameter=diameter(curve),
    )
