"""Explicit curve constructions and the locked-unknot build pipeline.

Generators for reference shapes (circle, stadium, trefoil), the open
overhand seed, strand doubling along a rotation-minimizing frame, the full
double-overhand unknot build and its stacked family, a greedy elementary-
segment classifier, and a heuristic unknottedness check based on
passage-forbidding polyline simplification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .curve import (
    Configuration,
    DiscreteCurve,
    diameter,
    discrete_curvature,
    length,
    resample,
    tangents,
)
from .dubins import close_open_curve, derive_cap_configurations
from .errors import (
    InfeasibleSeed,
    NotAKnot,
    OffsetCurvatureViolation,
    PreconditionViolated,
    ThickknotError,
)
from .frames import rotation_minimizing_normals
from .sono import TightenConfig, control_curvature, tighten_open
from .thickness import thickness

__all__ = [
    "FramedCurve",
    "SegmentLabel",
    "round_circle",
    "stadium",
    "closed_trefoil",
    "open_overhand",
    "framed",
    "doubled_core",
    "build_locked_unknot",
    "build_stacked_unknot",
    "classify_segments",
    "unconstrained_unknot_check",
]

CURVATURE_TOL = 0.02


# -- reference shapes ---------------------------------------------------------


def round_circle(radius: float, n: int, tube_radius: float = 1.0) -> DiscreteCurve:
    """Planar regular n-gon approximation of a circle."""
    if n < 8:
        raise ValueError("need at least 8 points")
    theta = 2.0 * math.pi * np.arange(n) / n
    pts = np.stack([radius * np.cos(theta), radius * np.sin(theta), np.zeros(n)], axis=1)
    return DiscreteCurve(pts, closed=True, tube_radius=tube_radius)


def stadium(straight: float = 2.0, n: int = 256, tube_radius: float = 0.5) -> DiscreteCurve:
    """Two straights at distance 2 joined by unit semicircles (curvature 1)."""
    half = 0.5 * straight
    dense = []
    m = 256
    for t in np.linspace(-half, half, m, endpoint=False):
        dense.append((t, 1.0, 0.0))
    for a in np.linspace(0.5 * math.pi, -0.5 * math.pi, m, endpoint=False):
        dense.append((half + math.cos(a), math.sin(a), 0.0))
    for t in np.linspace(half, -half, m, endpoint=False):
        dense.append((t, -1.0, 0.0))
    for a in np.linspace(-0.5 * math.pi, -1.5 * math.pi, m, endpoint=False):
        dense.append((-half + math.cos(a), math.sin(a), 0.0))
    curve = DiscreteCurve(np.asarray(dense), closed=True, tube_radius=tube_radius)
    return resample(curve, n)


def closed_trefoil(n: int = 256, scale: float = 1.0, tube_radius: float = 0.0) -> DiscreteCurve:
    """Standard (2,3) torus-knot polyline."""
    t = 2.0 * math.pi * np.arange(n) / n
    pts = scale * np.stack(
        [
            np.sin(t) + 2.0 * np.sin(2.0 * t),
            np.cos(t) - 2.0 * np.cos(2.0 * t),
            -np.sin(3.0 * t),
        ],
        axis=1,
    )
    return DiscreteCurve(pts, closed=True, tube_radius=tube_radius)


# -- the open overhand seed ----------------------------------------------------


def _dubins_points(p0, t0, p1, t1, radius, spacing) -> np.ndarray:
    """Sampled curvature-bounded connector with turning radius ``radius``."""
    from .dubins import solve_dubins

    r = float(radius)
    path = solve_dubins(
        Configuration(np.asarray(p0, float) / r, t0),
        Configuration(np.asarray(p1, float) / r, t1),
    )
    return r * path.sample(spacing / r)


def _overhand_skeleton(gap: float) -> np.ndarray:
    """C1 polyline of an open overhand: a two-strand twist region with one
    outside return strand.

    The curve rises from the bottom wall into the left twist strand, twists
    3 half-turns around its partner, returns down the outside of the twist
    region, climbs the partner strand, and exits to the top wall.  Closing
    it by a far return path yields a trefoil.  All pieces (twist formula
    with eased ends, Dubins connectors of turning radius 1.15) keep
    curvature at most 0.88, so no global smoothing is needed.
    """
    u = gap / 12.0
    rho, z_lo, z_hi, r_out, r_turn = 1.05, 2.45, 9.15, 3.4, 1.15
    # sample well below the working resolution so later resampling of the
    # polyline does not concentrate turning angles at single vertices
    spacing = 0.05

    zz = np.linspace(z_lo, z_hi, 320)
    s = (zz - z_lo) / (z_hi - z_lo)
    # smootherstep easing: twist rate and its slope vanish at both ends
    phi = 3.0 * math.pi * (6.0 * s**5 - 15.0 * s**4 + 10.0 * s**3)
    plus = np.stack([rho * np.cos(phi), rho * np.sin(phi), zz], axis=1)
    minus = np.stack([-rho * np.cos(phi), -rho * np.sin(phi), zz], axis=1)

    up = (0, 0, 1)
    down = (0, 0, -1)
    top = gap / u
    lead_in = np.linspace((0, 0, 0), (0, 0, 0.45), 10)
    tail1 = _dubins_points((0, 0, 0.45), up, (-rho, 0, z_lo), up, r_turn, spacing)
    over = _dubins_points((rho, 0, z_hi), up, (r_out, 0, z_hi), down, r_turn, spacing)
    outside = np.linspace((r_out, 0, z_hi), (r_out, 0, z_lo), 140)
    under = _dubins_points((r_out, 0, z_lo), down, (rho, 0, z_lo), up, r_turn, spacing)
    tail2 = _dubins_points((-rho, 0, z_hi), up, (0, 0, top - 0.3), up, r_turn, spacing)
    lead_out = np.linspace((0, 0, top - 0.3), (0, 0, top), 8)

    pieces = [lead_in, tail1, minus, over, outside, under, plus, tail2, lead_out]
    pts = [pieces[0][0]]
    for piece in pieces:
        for p in piece:
            if np.linalg.norm(np.asarray(p, float) - pts[-1]) > 1e-9:
                pts.append(np.asarray(p, float))
    return u * np.asarray(pts)


def _min_clearance(curve: DiscreteCurve, window: float) -> float:
    """Smallest vertex-pair distance outside an arc-length window."""
    pts = curve.points
    s = curve.arc_positions()
    d = np.linalg.norm(pts[None, :, :] - pts[:, None, :], axis=2)
    sep = np.abs(s[None, :] - s[:, None])
    if curve.closed:
        total = length(curve)
        sep = np.minimum(sep, total - sep)
    d[sep < window] = np.inf
    return float(d.min())


def _densify(waypoints: np.ndarray, spacing: float) -> np.ndarray:
    out = [waypoints[0]]
    for a, b in zip(waypoints[:-1], waypoints[1:]):
        seg = np.linalg.norm(b - a)
        m = max(1, int(math.ceil(seg / spacing)))
        for k in range(1, m + 1):
            out.append(a + (b - a) * (k / m))
    return np.asarray(out)


def _pin_vertical_ends(curve: DiscreteCurve, gap: float) -> DiscreteCurve:
    pts = curve.points.copy()
    h = curve.h
    pts[:, 2] = np.clip(pts[:, 2], 0.0, gap)
    pts[0] = (0.0, 0.0, 0.0)
    pts[-1] = (0.0, 0.0, gap)
    pts[1] = (0.0, 0.0, h)
    pts[-2] = (0.0, 0.0, gap - h)
    return curve.with_points(pts)


def open_overhand(wall_gap: float = 12.0, n: int = 420) -> DiscreteCurve:
    """Open overhand (open trefoil) seed between the walls z=0 and z=wall_gap.

    Endpoints sit exactly on the walls with vertical tangents, the curve
    stays inside the slab, and the curvature bound holds after a local
    smoothing repair.  Closing the seed by a far return path gives a
    trefoil, which is what locks the capped double core geometrically.
    """
    skeleton = _overhand_skeleton(wall_gap)
    curve = DiscreteCurve(skeleton, closed=False, tube_radius=1.0)
    curve = resample(curve, n)
    curve = control_curvature(curve, bound=0.95, max_sweeps=100)
    curve = resample(curve, n)
    curve = _pin_vertical_ends(curve, wall_gap)

    kappa = discrete_curvature(curve)
    if kappa.size and kappa.max() > 1.0 + CURVATURE_TOL:
        raise InfeasibleSeed(f"seed curvature {kappa.max():.3f} exceeds the bound")
    z = curve.points[:, 2]
    if z.min() < -1e-9 or z.max() > wall_gap + 1e-9:
        raise InfeasibleSeed("seed leaves the wall slab")
    if _min_clearance(curve, window=math.pi * max(1.0, curve.h)) < 1.05:
        raise InfeasibleSeed("seed strands start too close to repair toward thickness 2")
    return curve


# -- strand doubling -----------------------------------------------------------


@dataclass(frozen=True)
class FramedCurve:
    """Curve with rotation-minimizing unit normals at every vertex."""

    base: DiscreteCurve
    normals: np.ndarray

    def __post_init__(self):
        norms = np.linalg.norm(self.normals, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-9):
            raise ValueError("normals must be unit vectors")
        tang = tangents(self.base)
        if np.any(np.abs(np.einsum("ij,ij->i", self.normals, tang)) > 1e-9):
            raise ValueError("normals must be orthogonal to tangents")


def framed(curve: DiscreteCurve) -> FramedCurve:
    """Rotation-minimizing framing of a single-strand curve."""
    if curve.breaks:
        raise PreconditionViolated("framing handles single-strand curves")
    tang = tangents(curve)
    normals = rotation_minimizing_normals(curve.points, tang)
    return FramedCurve(base=curve, normals=normals)


def doubled_core(
    core: DiscreteCurve,
    offset: float = 0.5,
    on_violation: str = "raise",
    thickness_slack: float = 0.05,
) -> DiscreteCurve:
    """Two parallel strands offset along a twist-minimizing frame.

    The tube around ``core`` is replaced by two strands of radius
    ``offset`` at base +- offset * normal along the rotation-minimizing
    frame, serialised as one open two-component record.  Where the inner
    offset exceeds the curvature bound the result is
    OffsetCurvatureViolation unless ``on_violation='report'``; the
    tightening pre-repair phase is the intended consumer of unrepaired
    output.
    """
    if core.closed:
        raise PreconditionViolated("doubling expects an open core")
    need = 2.0 * offset + 1.0 - thickness_slack
    have = thickness(core)
    if have < min(2.0, need):
        raise PreconditionViolated(
            f"core thickness {have:.3f} leaves no room for two offset strands"
        )
    frame = framed(core)
    plus = core.points + offset * frame.normals
    minus = core.points - offset * frame.normals
    # wall-clamped cores have exactly vertical end segments; keep the
    # sub-strand ends vertical too so they satisfy the same clamp
    for arr in (plus, minus):
        for first, second, third in ((0, 1, 2), (-1, -2, -3)):
            t_end = core.points[second] - core.points[first]
            t_end /= np.linalg.norm(t_end)
            if abs(abs(t_end[2]) - 1.0) < 1e-9:
                step = np.linalg.norm(arr[second] - arr[first])
                arr[second] = arr[first] + step * t_end
    pts = np.vstack([plus, minus])
    out = DiscreteCurve(pts, closed=False, tube_radius=offset, breaks=(len(plus),))
    kappa = discrete_curvature(out)
    if kappa.size and kappa.max() > 1.0 + CURVATURE_TOL and on_violation == "raise":
        raise OffsetCurvatureViolation(
            f"offset strand curvature {kappa.max():.3f} exceeds the bound",
            indices=np.where(kappa > 1.0 + CURVATURE_TOL)[0],
            max_curvature=float(kappa.max()),
        )
    return out


# -- the locked unknot and its stacked family ----------------------------------


def _tag_stage(stage: str, exc: ThickknotError):
    exc.args = (f"[{stage}] {exc.args[0]}",) + exc.args[1:] if exc.args else (f"[{stage}]",)
    raise exc


@lru_cache(maxsize=4)
def _tight_double_core(wall_gap: float, n: int, seed: int) -> DiscreteCurve:
    """Tightened two-strand open core of the locked unknot (cached)."""
    try:
        seed_curve = open_overhand(wall_gap=wall_gap, n=n)
    except ThickknotError as exc:
        _tag_stage("open_overhand", exc)
    try:
        cfg = TightenConfig(
            target_thickness=2.0,
            wall_gap=wall_gap,
            max_iters=2500,
            stall_window=300,
            stall_tolerance=1e-6,
            seed=seed,
        )
        core = tighten_open(seed_curve, cfg).final_curve
    except ThickknotError as exc:
        _tag_stage("tighten_open(core)", exc)
    try:
        double = doubled_core(core, offset=0.5, on_violation="report")
    except ThickknotError as exc:
        _tag_stage("doubled_core", exc)
    try:
        cfg2 = TightenConfig(
            target_thickness=1.0,
            wall_gap=wall_gap,
            max_iters=250,
            stall_window=150,
            stall_tolerance=1e-6,
            overlap_push_iters=12,
            seed=seed,
        )
        return tighten_open(double, cfg2).final_curve
    except ThickknotError as exc:
        _tag_stage("tighten_open(double)", exc)


def build_locked_unknot(wall_gap: float = 12.0, n: int = 420, seed: int = 0) -> DiscreteCurve:
    """Full pipeline for the double-overhand thin unknot (tube radius 1/2).

    Seeds an open overhand, tightens it at thickness 2, embeds two parallel
    thickness-1 strands, re-tightens the pair, and closes it with planar
    caps: a topologically trivial loop locked by its own wrap.
    """
    double = _tight_double_core(wall_gap, n, seed)
    try:
        pairs = derive_cap_configurations(double)
        return close_open_curve(double, pairs)
    except ThickknotError as exc:
        _tag_stage("close_open_curve", exc)


def build_stacked_unknot(
    n: int, wall_gap: float = 12.0, core_points: int = 420, seed: int = 0, joiner: float = 1.0
) -> DiscreteCurve:
    """n vertically aligned copies of the locked-unknot core in one loop.

    Copies stack along z, each rotated so its strand ends sit exactly above
    the previous copy's, joined by straight vertical tubes and capped at
    the extreme ends.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    double = _tight_double_core(wall_gap, core_points, seed)
    comps = double.components()
    a_pts, b_pts = comps[0].points, comps[1].points
    h = double.h

    twist = math.atan2(a_pts[-1][1], a_pts[-1][0]) - math.atan2(a_pts[0][1], a_pts[0][0])
    strands_a, strands_b = [a_pts], [b_pts]
    for k in range(1, n):
        ang = k * twist
        rot = np.array(
            [
                [math.cos(ang), -math.sin(ang), 0.0],
                [math.sin(ang), math.cos(ang), 0.0],
                [0.0, 0.0, 1.0],
            ]
        )
        shift = np.array([0.0, 0.0, k * (wall_gap + joiner)])
        strands_a.append(a_pts @ rot.T + shift)
        strands_b.append(b_pts @ rot.T + shift)

    def _with_joiners(strands):
        out = [strands[0]]
        for prev, nxt in zip(strands[:-1], strands[1:]):
            top, bottom = prev[-1], nxt[0]
            if np.linalg.norm((bottom - top)[:2]) > 1e-6:
                raise PreconditionViolated("stacked strand ends are not vertically aligned")
            gap_len = float(np.linalg.norm(bottom - top))
            m = max(2, int(math.ceil(gap_len / h)))
            steps = np.linspace(0.0, 1.0, m + 1)[1:-1]
            out.append(top + steps[:, None] * (bottom - top))
            out.append(nxt)
        return np.vstack(out)

    big_a = _with_joiners(strands_a)
    big_b = _with_joiners(strands_b)
    stacked = DiscreteCurve(
        np.vstack([big_a, big_b]),
        closed=False,
        tube_radius=double.tube_radius,
        breaks=(len(big_a),),
    )
    try:
        pairs = derive_cap_configurations(stacked)
        return close_open_curve(stacked, pairs)
    except ThickknotError as exc:
        _tag_stage("close_open_curve", exc)


# -- elementary segment classifier ---------------------------------------------


@dataclass(frozen=True)
class SegmentLabel:
    """Labelled vertex range (half-open; may wrap past n on closed curves)."""

    range: tuple
    kind: str
    fit_residual: float


DEFAULT_THRESHOLDS = {
    "straight_max": 0.12,
    "unit_arc_tol": 0.12,
    "torsion_planar_max": 0.25,
    "cv_max": 0.05,
    "min_run": 4,
}


def _vertex_curvature(curve: DiscreteCurve) -> np.ndarray:
    n = curve.n
    kappa = np.zeros(n)
    kap = discrete_curvature(curve)
    if curve.closed:
        kappa[:] = kap
    else:
        kappa[1:-1] = kap
        kappa[0], kappa[-1] = kappa[1], kappa[-2]
    return kappa


def _vertex_torsion(curve: DiscreteCurve) -> np.ndarray:
    """Unsigned discrete torsion magnitude per vertex."""
    pts = curve.points
    n = curve.n
    h = curve.h
    if curve.closed:
        a = pts - np.roll(pts, 1, axis=0)
        b = np.roll(pts, -1, axis=0) - pts
    else:
        a = pts[1:-1] - pts[:-2]
        b = pts[2:] - pts[1:-1]
    binorm = np.cross(a, b)
    norms = np.linalg.norm(binorm, axis=1, keepdims=True)
    ok = norms[:, 0] > 1e-12
    binorm = np.where(norms > 1e-12, binorm / np.maximum(norms, 1e-30), 0.0)
    m = len(binorm)
    tors = np.zeros(m)
    nxt = (np.arange(m) + 1) % m if curve.closed else np.arange(m) + 1
    for i in range(m if curve.closed else m - 1):
        j = nxt[i]
        if ok[i] and ok[j]:
            c = float(np.clip(np.dot(binorm[i], binorm[j]), -1.0, 1.0))
            tors[j] = math.acos(c) / h
    out = np.zeros(n)
    if curve.closed:
        out[:] = tors
    else:
        out[1:-1] = tors
        # first two and last interior values are one-sided; backfill them
        if n > 4:
            out[1] = out[2] = out[3]
            out[-2] = out[-3]
        out[0] = out[1]
        out[-1] = out[-2]
    return out


def classify_segments(curve: DiscreteCurve, thresholds: dict | None = None) -> list:
    """Greedy decomposition into unit arcs, straights, helices, and other.

    Vertices are labelled from curvature and torsion estimates and merged
    into runs; runs shorter than ``min_run`` are absorbed into their
    predecessor so the labels cover every vertex.  Residuals are measured
    on the vertices that actually matched the model (transition vertices
    are covered but not scored).
    """
    if curve.breaks:
        raise PreconditionViolated("classification handles single-strand curves")
    thr = dict(DEFAULT_THRESHOLDS)
    if thresholds:
        thr.update(thresholds)
    n = curve.n
    kappa = _vertex_curvature(curve)
    tors = _vertex_torsion(curve)

    raw = np.empty(n, dtype=object)
    for i in range(n):
        if kappa[i] <= thr["straight_max"]:
            raw[i] = "Straight"
        elif abs(kappa[i] - 1.0) <= thr["unit_arc_tol"] and tors[i] <= thr["torsion_planar_max"]:
            raw[i] = "UnitArc"
        else:
            raw[i] = "Candidate"

    # rotate a closed curve so index 0 starts at a label boundary
    shift = 0
    if curve.closed and len(set(raw)) > 1:
        for i in range(n):
            if raw[i] != raw[i - 1]:
                shift = i
                break
    seq = np.roll(raw, -shift)

    runs = []  # [start, stop, kind, core_indices]
    start = 0
    for i in range(1, n + 1):
        if i == n or seq[i] != seq[start]:
            runs.append([start, i, seq[start], list(range(start, i))])
            start = i

    def _resolve(kind, core):
        if kind != "Candidate":
            return kind
        idx = (np.asarray(core) + shift) % n
        kap_run, tor_run = kappa[idx], tors[idx]
        mean_k, mean_t = kap_run.mean(), tor_run.mean()
        cv_k = kap_run.std() / mean_k if mean_k > 1e-9 else math.inf
        cv_t = tor_run.std() / mean_t if mean_t > 1e-9 else math.inf
        if cv_k < thr["cv_max"] and cv_t < thr["cv_max"] and mean_k > thr["straight_max"]:
            return "Helix"
        return "Other"

    for run in runs:
        if run[1] - run[0] >= thr["min_run"]:
            run[2] = _resolve(run[2], run[3])

    # absorb short runs into their predecessor (next run for the first one)
    while len(runs) > 1:
        short = next((k for k, r in enumerate(runs) if r[1] - r[0] < thr["min_run"]), None)
        if short is None:
            break
        r = runs.pop(short)
        target = runs[short - 1] if short > 0 else runs[0]
        if short > 0:
            target[1] = r[1]
        else:
            target[0] = r[0]
        # absorbed vertices extend coverage but not the fit core

    # merge adjacent equal-kind runs
    merged = [runs[0]]
    for r in runs[1:]:
        if r[2] == merged[-1][2]:
            merged[-1][1] = r[1]
            merged[-1][3] = merged[-1][3] + r[3]
        else:
            merged.append(r)
    if curve.closed and len(merged) > 1 and merged[0][2] == merged[-1][2]:
        merged[-1][1] = merged[0][1] + n
        merged[-1][3] = merged[-1][3] + merged[0][3]
        merged.pop(0)

    out = []
    for lo, hi, kind, core in merged:
        idx = (np.asarray(core) + shift) % n
        kap_run, tor_run = kappa[idx], tors[idx]
        if kind == "Straight":
            resid = float(kap_run.max(initial=0.0))
        elif kind == "UnitArc":
            resid = float(np.abs(kap_run - 1.0).max(initial=0.0))
        elif kind == "Helix":
            mean_k, mean_t = kap_run.mean(), tor_run.mean()
            resid = float(max(kap_run.std() / mean_k, tor_run.std() / mean_t))
        else:
            resid = math.nan
        out.append(
            SegmentLabel(range=(int((lo + shift) % n), int((lo + shift) % n + (hi - lo))), kind=kind, fit_residual=resid)
        )
    return out


# -- heuristic unknottedness ----------------------------------------------------


def _triangle_blocked(a, b, c, starts, ends, skip, shared_points, eps):
    """True if any listed segment passes through triangle (a, b, c)."""
    nrm = np.cross(b - a, c - a)
    area2 = float(np.linalg.norm(nrm))
    if area2 < eps * eps:
        return False  # degenerate triangle sweeps no area
    nrm = nrm / area2
    d0 = (starts - a) @ nrm
    d1 = (ends - a) @ nrm
    cand = np.ones(len(starts), dtype=bool)
    if len(skip):
        cand[np.asarray(skip)] = False
    same_side = ((d0 > eps) & (d1 > eps)) | ((d0 < -eps) & (d1 < -eps))
    cand &= ~same_side
    if not cand.any():
        return False
    v0 = c - a
    v1 = b - a
    dot00 = float(v0 @ v0)
    dot01 = float(v0 @ v1)
    dot11 = float(v1 @ v1)
    denom = dot00 * dot11 - dot01 * dot01
    if abs(denom) < 1e-30:
        return False
    for i in np.where(cand)[0]:
        p, q = starts[i], ends[i]
        if abs(d0[i]) < eps and abs(d1[i]) < eps:
            if _coplanar_segment_hits_triangle(p, q, a, b, c, nrm, shared_points, eps):
                return True
            continue
        denom_t = d0[i] - d1[i]
        t = d0[i] / denom_t if denom_t != 0.0 else 0.5
        if t < -1e-12 or t > 1.0 + 1e-12:
            continue
        x = p + t * (q - p)
        v2 = x - a
        dot02 = float(v0 @ v2)
        dot12 = float(v1 @ v2)
        u = (dot11 * dot02 - dot01 * dot12) / denom
        v = (dot00 * dot12 - dot01 * dot02) / denom
        if u >= -1e-9 and v >= -1e-9 and u + v <= 1.0 + 1e-9:
            if any(np.linalg.norm(x - s) < 10.0 * eps for s in shared_points):
                continue
            return True
    return False


def _coplanar_segment_hits_triangle(p, q, a, b, c, nrm, shared_points, eps):
    """Exact 2D test for a segment lying in the triangle's plane."""
    u = b - a
    u = u / np.linalg.norm(u)
    v = np.cross(nrm, u)

    def to2d(x):
        return np.array([float((x - a) @ u), float((x - a) @ v)])

    t2 = [np.zeros(2), to2d(b), to2d(c)]
    p2, q2 = to2d(p), to2d(q)
    shared2 = [to2d(s) for s in shared_points]

    def cross2(w1, w2):
        return w1[0] * w2[1] - w1[1] * w2[0]

    def inside(x2):
        s1 = cross2(t2[1] - t2[0], x2 - t2[0])
        s2 = cross2(t2[2] - t2[1], x2 - t2[1])
        s3 = cross2(t2[0] - t2[2], x2 - t2[2])
        return (s1 >= -eps and s2 >= -eps and s3 >= -eps) or (
            s1 <= eps and s2 <= eps and s3 <= eps
        )

    def is_shared(x2):
        return any(np.linalg.norm(x2 - s) < 10.0 * eps for s in shared2)

    for x2 in (p2, q2):
        if inside(x2) and not is_shared(x2):
            return True
    for e0, e1 in ((t2[0], t2[1]), (t2[1], t2[2]), (t2[2], t2[0])):
        d1 = cross2(q2 - p2, e0 - p2)
        d2 = cross2(q2 - p2, e1 - p2)
        d3 = cross2(e1 - e0, p2 - e0)
        d4 = cross2(e1 - e0, q2 - e0)
        if (d1 > eps) != (d2 > eps) and (d3 > eps) != (d4 > eps):
            x2 = p2 + (q2 - p2) * (d3 / (d3 - d4) if d3 != d4 else 0.5)
            if not is_shared(x2):
                return True
    return False


def _simplify_loop(points: np.ndarray, eps: float, max_rounds: int = 200) -> np.ndarray:
    """Remove vertices whose span triangle is clear; knot type is preserved."""
    pts = [np.asarray(p, float) for p in points]
    for _ in range(max_rounds):
        removed = False
        i = 0
        while len(pts) > 3 and i < len(pts):
            n = len(pts)
            ia, ib, ic = (i - 1) % n, i, (i + 1) % n
            a, b, c = pts[ia], pts[ib], pts[ic]
            starts = np.asarray(pts)
            ends = np.roll(starts, -1, axis=0)
            prev_edge = (ia - 1) % n
            next_edge = ic
            blocked = _triangle_blocked(
                a, b, c, starts, ends, [ia, ib, prev_edge, next_edge], [], eps
            ) or _triangle_blocked(
                a,
                b,
                c,
                starts[[prev_edge, next_edge]],
                ends[[prev_edge, next_edge]],
                [],
                [a, c],
                eps,
            )
            if not blocked:
                del pts[ib]
                removed = True
            else:
                i += 1
        if not removed:
            break
    return np.asarray(pts)


def _fibonacci_directions(m: int) -> np.ndarray:
    k = np.arange(m)
    phi = math.pi * (3.0 - math.sqrt(5.0))
    z = 1.0 - 2.0 * (k + 0.5) / m
    r = np.sqrt(1.0 - z * z)
    return np.stack([r * np.cos(phi * k), r * np.sin(phi * k), z], axis=1)


def _cross2(u, v) -> float:
    return float(u[0] * v[1] - u[1] * v[0])


def _diagram(points: np.ndarray, direction: np.ndarray, eps: float):
    """Knot diagram along ``direction``: crossing events, or None if degenerate.

    Each crossing is (edge_under, t_under, edge_over, t_over).
    """
    d = direction / np.linalg.norm(direction)
    e1 = np.cross(d, np.array([1.0, 0.0, 0.0]))
    if np.linalg.norm(e1) < 1e-6:
        e1 = np.cross(d, np.array([0.0, 1.0, 0.0]))
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(d, e1)
    pts2 = np.stack([points @ e1, points @ e2], axis=1)
    depth = points @ d
    n = len(pts2)
    crossings = []
    for i in range(n):
        p1, p2 = pts2[i], pts2[(i + 1) % n]
        for j in range(i + 1, n):
            if (j + 1) % n == i or (i + 1) % n == j:
                continue
            q1, q2 = pts2[j], pts2[(j + 1) % n]
            d1 = _cross2(p2 - p1, q1 - p1)
            d2 = _cross2(p2 - p1, q2 - p1)
            d3 = _cross2(q2 - q1, p1 - q1)
            d4 = _cross2(q2 - q1, p2 - q1)
            if any(abs(v) < eps for v in (d1, d2, d3, d4)):
                # ambiguous only if the segments can actually meet
                lo = np.maximum(np.minimum(p1, p2), np.minimum(q1, q2))
                hi = np.minimum(np.maximum(p1, p2), np.maximum(q1, q2))
                if np.all(lo <= hi + math.sqrt(eps)):
                    return None
                continue
            if (d1 > 0) != (d2 > 0) and (d3 > 0) != (d4 > 0):
                ti = d3 / (d3 - d4)
                tj = d1 / (d1 - d2)
                zi = depth[i] + ti * (depth[(i + 1) % n] - depth[i])
                zj = depth[j] + tj * (depth[(j + 1) % n] - depth[j])
                if abs(zi - zj) < eps:
                    return None
                if zi > zj:
                    crossings.append((j, tj, i, ti))
                else:
                    crossings.append((i, ti, j, tj))
    return crossings


def _projected_crossings(points: np.ndarray, direction: np.ndarray, eps: float):
    """Crossing count of the knot diagram along ``direction``, or None."""
    diagram = _diagram(points, direction, eps)
    return None if diagram is None else len(diagram)


def _tricolorable(points: np.ndarray, diagram) -> bool:
    """True if the diagram admits a nontrivial Fox 3-coloring.

    Tricolorability is a knot invariant, so a True answer certifies that
    the loop is knotted (the unknot only has constant colorings).
    """
    if not diagram:
        return False
    n = len(points)
    # arcs are maximal runs between undercrossing events along the loop
    events = sorted((u_edge, t, idx) for idx, (u_edge, t, _, _) in enumerate(diagram))
    if not events:
        return False
    arc_of_event = {}
    arc = 0
    for k, (_, _, idx) in enumerate(events):
        arc_of_event[idx] = arc  # arc that STARTS right after this undercrossing
        arc += 1
    n_arcs = len(events)

    def arc_at(edge, t):
        """Arc id covering parameter position (edge, t) along the loop."""
        lo, hi = 0, len(events)
        pos = (edge, t)
        # find first event strictly after pos; arc started at previous event
        import bisect

        keys = [(e, tt) for (e, tt, _) in events]
        k = bisect.bisect_left(keys, pos)
        return arc_of_event[events[(k - 1) % n_arcs][2]]

    rows = []
    for idx, (u_edge, t_u, o_edge, t_o) in enumerate(diagram):
        incoming = arc_at(u_edge, t_u - 1e-12)
        outgoing = arc_of_event[idx]
        over = arc_at(o_edge, t_o)
        row = np.zeros(n_arcs, dtype=np.int64)
        row[incoming] += 1
        row[outgoing] += 1
        row[over] += 1
        rows.append(row % 3)
    mat = np.array(rows) % 3
    rank = _gf3_rank(mat)
    return n_arcs - rank >= 2


def _gf3_rank(mat: np.ndarray) -> int:
    m = mat.copy() % 3
    rows, cols = m.shape
    rank = 0
    for col in range(cols):
        pivot = None
        for r in range(rank, rows):
            if m[r, col] % 3:
                pivot = r
                break
        if pivot is None:
            continue
        m[[rank, pivot]] = m[[pivot, rank]]
        inv = 1 if m[rank, col] % 3 == 1 else 2
        m[rank] = (m[rank] * inv) % 3
        for r in range(rows):
            if r != rank and m[r, col] % 3:
                m[r] = (m[r] - m[r, col] * m[rank]) % 3
        rank += 1
        if rank == rows:
            break
    return rank


def unconstrained_unknot_check(curve: DiscreteCurve) -> str:
    """Heuristic verdict: 'unknotted', 'nontrivial', or 'inconclusive'.

    Relaxes the polyline by passage-forbidding triangle moves (which
    preserve the knot type) and inspects the result: at most 5 vertices or
    a projection with at most 2 crossings certifies the unknot; a stable
    simplified diagram with 3 or more crossings in every sampled projection
    is reported nontrivial.  A test oracle, never a proof of knottedness.
    """
    if not curve.closed:
        raise NotAKnot("unknot check needs a closed curve")
    scale = float(np.ptp(curve.points, axis=0).max())
    eps = 1e-9 * max(scale, 1.0)
    reduced = _simplify_loop(curve.points, eps)
    if len(reduced) <= 5:
        return "unknotted"
    counts = []
    span = float(np.ptp(reduced, axis=0).max())
    for direction in _fibonacci_directions(48):
        diagram = _diagram(reduced, direction, eps=1e-12 * span * span)
        if diagram is None:
            continue
        if len(diagram) <= 2:
            return "unknotted"
        counts.append(len(diagram))
        if _tricolorable(reduced, diagram):
            return "nontrivial"
    if counts and min(counts) >= 3:
        return "nontrivial"
    return "inconclusive"
