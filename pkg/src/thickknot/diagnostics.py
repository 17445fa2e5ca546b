"""Geometric obstruction diagnostics.

Short/long arc classification against a unit ball and reference sphere,
aperture extraction (bottleneck contour, spanning disk, near-contact
region, cone angle at a long-arc tip), persistence of those quantities
along traces, and penalty-method optimization probes for the two
curvature-obstruction lemmas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage, optimize
from skimage import measure

from .curve import DiscreteCurve, diameter, length
from .errors import EmptyTrace, NoAperture, PreconditionViolated, ThickknotError
from .frames import any_unit_normal
from .thickness import distance_to_centerline

__all__ = [
    "ArcClass",
    "ApertureTriple",
    "PersistenceReport",
    "ProbeReport",
    "classify_arc",
    "extract_aperture",
    "trace_diagnostics",
    "probe_ball_lemma",
    "probe_cylinder_lemma",
]

#: model limitations recorded in every aperture report
APERTURE_NOTES = (
    "planar-disk model: the spanning disk is flat",
    "reach proxy: centerline distance minus tube radius",
)


@dataclass(frozen=True)
class ArcClass:
    """Classification of an arc with endpoints on a unit ball boundary."""

    kind: str  # 'Short' | 'Long' | 'Neither'
    witness: dict


@dataclass(frozen=True)
class ApertureTriple:
    """Bottleneck data: surface contour, planar spanning disk, near-contact region."""

    contour: np.ndarray  # (m, 3) closed polyline on the tube surface
    plane_point: np.ndarray
    plane_normal: np.ndarray
    near_contact_area: float
    tip: np.ndarray
    cone_angle: float
    disk_diameter: float
    notes: tuple = APERTURE_NOTES


@dataclass(frozen=True)
class PersistenceReport:
    """Minima of the aperture quantities over the frames of a trace.

    Frames where no aperture could be recovered are listed separately and
    excluded from the minima; a lost aperture is evidence of either
    disentanglement or diagnostic failure, never silently a zero.
    """

    min_disk_diameter: float
    min_near_contact_area: float
    min_cone_angle: float
    frames: int
    lost_frames: tuple = ()


@dataclass(frozen=True)
class ProbeReport:
    """Outcome of an optimization probe against a lemma's prediction."""

    best_max_curvature: float
    candidate: DiscreteCurve | None
    attempts: int
    valid_candidates: int
    seed: int


# -- short / long arcs ---------------------------------------------------------


def _axis(ball_center, sphere_center):
    axis = np.asarray(ball_center, float) - np.asarray(sphere_center, float)
    norm = np.linalg.norm(axis)
    if norm < 1e-12:
        raise PreconditionViolated("sphere center must lie off the ball center")
    return axis / norm


def point_above_sphere(points, sphere_center, axis) -> np.ndarray:
    """Mask of points strictly above the unit sphere S.

    Above means beyond the sphere's far pole along the axis, and within the
    sphere's radial shadow: the configuration of an arc apex that has
    passed over S.
    """
    w = np.atleast_2d(points) - np.asarray(sphere_center, float)
    along = w @ axis
    radial = w - np.outer(along, axis)
    r = np.linalg.norm(radial, axis=1)
    return (r < 1.0) & (along > 1.0)


def classify_arc(arc: DiscreteCurve, ball_center, sphere_center) -> ArcClass:
    """Classify an arc against the radius-1 ball B and reference sphere S.

    Short: the arc lies on the ball boundary (within one segment length) or
    strictly inside except at its endpoints.  Long: some point lies above
    S.  The two are mutually exclusive for curvature-bounded arcs; if both
    criteria fire the classification fails loudly.
    """
    if arc.closed:
        raise PreconditionViolated("classification applies to open arcs")
    c = np.asarray(ball_center, float)
    pts = arc.points
    radii = np.linalg.norm(pts - c, axis=1)
    if abs(radii[0] - 1.0) > 1e-6 or abs(radii[-1] - 1.0) > 1e-6:
        raise PreconditionViolated("arc endpoints must lie on the unit ball boundary")
    h = arc.h
    axis = _axis(ball_center, sphere_center)

    on_boundary = bool(np.abs(radii - 1.0).max() <= h)
    interior_inside = bool(radii[1:-1].max() <= 1.0 + 1e-9) if arc.n > 2 else True
    short = on_boundary or interior_inside

    above = point_above_sphere(pts, sphere_center, axis)
    long_arc = bool(above.any())

    if short and long_arc:
        raise ThickknotError(
            "arc satisfies both the short and long criteria; mutual exclusivity violated"
        )
    if short:
        witness = {
            "case": "boundary" if on_boundary else "interior",
            "max_radius": float(radii.max()),
            "max_boundary_deviation": float(np.abs(radii - 1.0).max()),
        }
        return ArcClass(kind="Short", witness=witness)
    if long_arc:
        along = (pts - np.asarray(sphere_center, float)) @ axis
        k = int(np.argmax(np.where(above, along, -np.inf)))
        witness = {
            "point_above": pts[k].copy(),
            "clearance": float(along[k] - 1.0),
        }
        return ArcClass(kind="Long", witness=witness)
    return ArcClass(kind="Neither", witness={"max_radius": float(radii.max())})


# -- aperture extraction ---------------------------------------------------------


def _cyclic_range_indices(n, lo, hi):
    if hi < lo:
        hi += n
    return np.arange(lo, hi + 1) % n


def _enclosing_contours(field, level, center_rc):
    """Sub-pixel contours of field == level that enclose the center pixel."""
    out = []
    for contour in measure.find_contours(field, level):
        if np.linalg.norm(contour[0] - contour[-1]) > 1e-9:
            continue  # open contour, touches the window edge
        # even-odd test in (row, col) space
        r, c = center_rc
        x, y = contour[:, 0], contour[:, 1]
        j = len(contour) - 1
        inside = False
        for i in range(len(contour)):
            if (y[i] > c) != (y[j] > c) and r < (x[j] - x[i]) * (c - y[i]) / (
                y[j] - y[i] + 1e-300
            ) + x[i]:
                inside = not inside
            j = i
        if inside:
            out.append(contour)
    return out


def extract_aperture(
    curve: DiscreteCurve,
    long_arc_range,
    plane_point,
    plane_normal,
    grid_spacing: float | None = None,
) -> ApertureTriple:
    """Aperture triple around the passage at ``plane_point``.

    The plane is rasterised around the hint point; the contour is the
    smallest closed level-set of the centerline-distance field (at the tube
    radius) that encloses the hint, provided the enclosed free region is
    bounded and the long arc actually crosses the spanned disk.  The
    near-contact region is integrated on the same grid.
    """
    r = curve.tube_radius
    if r <= 0.0:
        raise PreconditionViolated("aperture extraction needs a tube radius")
    tau = curve.tube_diameter
    p0 = np.asarray(plane_point, float)
    normal = np.asarray(plane_normal, float)
    normal = normal / np.linalg.norm(normal)
    u = any_unit_normal(normal)
    v = np.cross(normal, u)
    spacing = 0.5 * curve.h if grid_spacing is None else float(grid_spacing)

    if float(distance_to_centerline(curve, p0)[0]) <= r:
        raise NoAperture("plane point lies inside the tube")

    max_half = diameter(curve) + tau
    half = max(3.0 * tau, 12.0 * spacing)
    while True:
        m = int(math.ceil(2.0 * half / spacing)) + 1
        grid = np.linspace(-half, half, m)
        gx, gy = np.meshgrid(grid, grid, indexing="ij")
        plane_pts = p0 + gx[..., None] * u + gy[..., None] * v
        field = distance_to_centerline(curve, plane_pts.reshape(-1, 3)).reshape(m, m)

        free = field > r
        centre = (m // 2, m // 2)
        labels, _ = ndimage.label(free)
        comp = labels[centre]
        if comp == 0:
            raise NoAperture("plane point lies inside the tube")
        mask = labels == comp
        touches_edge = mask[0, :].any() or mask[-1, :].any() or mask[:, 0].any() or mask[:, -1].any()
        if not touches_edge:
            break
        half *= 1.6
        if half > max_half:
            raise NoAperture("free region around the plane point is unbounded")

    enclosing = _enclosing_contours(field, r, centre)
    if not enclosing:
        raise NoAperture("no closed tube-surface contour encloses the plane point")

    def signed_area(contour):
        x, y = contour[:, 0], contour[:, 1]
        return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))

    contour_rc = min(enclosing, key=signed_area)
    xy = np.stack(
        [np.interp(contour_rc[:, 0], np.arange(m), grid), np.interp(contour_rc[:, 1], np.arange(m), grid)],
        axis=1,
    )
    contour3d = p0 + xy[:, :1] * u + xy[:, 1:2] * v

    # long arc must pierce the spanned disk
    idx = _cyclic_range_indices(curve.n, *long_arc_range)
    arc_pts = curve.points[idx]
    sd = (arc_pts - p0) @ normal
    crossings = []
    for k in np.where(np.signbit(sd[:-1]) != np.signbit(sd[1:]))[0]:
        a, b = arc_pts[k], arc_pts[k + 1]
        t = sd[k] / (sd[k] - sd[k + 1])
        x = a + t * (b - a)
        crossings.append(((x - p0) @ u, (x - p0) @ v))
    if not crossings or not _points_in_polygon(np.asarray(crossings), xy).any():
        raise NoAperture("long arc does not pass through the spanned disk")

    # near-contact region: disk points whose reach falls below the diameter
    cell_pts = np.stack([gx.ravel(), gy.ravel()], axis=1)
    in_disk = _points_in_polygon(cell_pts, xy).reshape(m, m)
    near = in_disk & (field < r + tau)
    near_area = float(near.sum()) * spacing * spacing

    d2 = np.sum((contour3d[:, None, :] - contour3d[None, :, :]) ** 2, axis=2)
    disk_diameter = float(math.sqrt(d2.max()))

    tip_idx = int(np.argmax(np.abs((curve.points[idx] - p0) @ normal)))
    tip = curve.points[idx][tip_idx].copy()

    sample = contour3d[:: max(1, len(contour3d) // 360)]
    rel = sample - tip
    norms = np.linalg.norm(rel, axis=1)
    unit = rel / norms[:, None]
    cosmat = np.clip(unit @ unit.T, -1.0, 1.0)
    cone_angle = float(np.arccos(cosmat.min()))

    return ApertureTriple(
        contour=contour3d,
        plane_point=p0,
        plane_normal=normal,
        near_contact_area=near_area,
        tip=tip,
        cone_angle=cone_angle,
        disk_diameter=disk_diameter,
    )


def _points_in_polygon(points, polygon):
    x, y = points[:, 0], points[:, 1]
    inside = np.zeros(len(points), dtype=bool)
    px, py = polygon[:, 0], polygon[:, 1]
    j = len(polygon) - 1
    for i in range(len(polygon)):
        cond = ((py[i] > y) != (py[j] > y)) & (
            x < (px[j] - px[i]) * (y - py[i]) / (py[j] - py[i] + 1e-300) + px[i]
        )
        inside ^= cond
        j = i
    return inside


def trace_diagnostics(
    trace,
    long_arc_range,
    plane_point,
    plane_normal,
    grid_spacing: float | None = None,
) -> PersistenceReport:
    """Aperture persistence along a trace.

    The plane is re-optimised locally per frame: the previous accepted
    plane is tried first, then a deterministic fan of small rotations and
    offsets.  Frames with no recoverable aperture are reported as lost.
    """
    frames = getattr(trace, "frames", trace)
    if not frames:
        raise EmptyTrace("trace has no frames")
    point = np.asarray(plane_point, float)
    normal = np.asarray(plane_normal, float)
    normal = normal / np.linalg.norm(normal)

    minima = {"diam": math.inf, "area": math.inf, "angle": math.inf}
    lost = []
    found = 0
    for k, frame in enumerate(frames):
        aperture = None
        tau = frame.tube_diameter
        u = any_unit_normal(normal)
        v = np.cross(normal, u)
        candidates = [(point, normal)]
        for ang in (0.05, -0.05, 0.1, -0.1):
            for axis in (u, v):
                rot = _rotate_vector(normal, axis, ang)
                candidates.append((point, rot))
        for off in (0.25, -0.25, 0.5, -0.5):
            candidates.append((point + off * tau * normal, normal))
        for cand_point, cand_normal in candidates:
            try:
                aperture = extract_aperture(
                    frame, long_arc_range, cand_point, cand_normal, grid_spacing
                )
                point = np.asarray(cand_point, float)
                normal = np.asarray(cand_normal, float)
                break
            except NoAperture:
                continue
        if aperture is None:
            lost.append(k)
            continue
        found += 1
        minima["diam"] = min(minima["diam"], aperture.disk_diameter)
        minima["area"] = min(minima["area"], aperture.near_contact_area)
        minima["angle"] = min(minima["angle"], aperture.cone_angle)
    if found == 0:
        return PersistenceReport(math.nan, math.nan, math.nan, len(frames), tuple(lost))
    return PersistenceReport(
        min_disk_diameter=minima["diam"],
        min_near_contact_area=minima["area"],
        min_cone_angle=minima["angle"],
        frames=len(frames),
        lost_frames=tuple(lost),
    )


def _rotate_vector(vec, axis, angle):
    axis = axis / np.linalg.norm(axis)
    return (
        vec * math.cos(angle)
        + np.cross(axis, vec) * math.sin(angle)
        + axis * np.dot(axis, vec) * (1.0 - math.cos(angle))
    )


# -- optimization probes ---------------------------------------------------------


def _polyline_curvatures(pts: np.ndarray) -> np.ndarray:
    a = pts[1:-1] - pts[:-2]
    b = pts[2:] - pts[1:-1]
    la = np.linalg.norm(a, axis=1)
    lb = np.linalg.norm(b, axis=1)
    denom = np.maximum(la * lb, 1e-300)
    cosphi = np.clip(np.einsum("ij,ij->i", a, b) / denom, -1.0, 1.0)
    return np.sqrt(2.0 * (1.0 - cosphi)) / np.maximum(0.5 * (la + lb), 1e-300)


def _softmax(values: np.ndarray, beta: float = 60.0) -> float:
    m = values.max()
    return float(m + np.log(np.exp(beta * (values - m)).sum()) / beta)


def probe_ball_lemma(attempts: int = 100, seed: int = 0, n_vertices: int = 17) -> ProbeReport:
    """Search for a low-curvature arc inside the unit ball with an isolated
    boundary touch.

    Endpoints stay interior, one designated interior vertex is pinned to
    the boundary, and vertices two or more steps away must stay a gap
    inside.  The touch geometry forces the discrete curvature at the pinned
    vertex to 1, so the reported minimum hovering at 1 is the expected
    outcome; anything clearly below would contradict the ball lemma.
    """
    rng = np.random.default_rng(seed)
    m = n_vertices // 2
    gap = 0.03
    best = math.inf
    best_pts = None
    valid = 0
    for _ in range(attempts):
        p_start = rng.normal(size=3)
        p_start *= rng.uniform(0.3, 0.55) / np.linalg.norm(p_start)
        p_end = rng.normal(size=3)
        p_end *= rng.uniform(0.3, 0.55) / np.linalg.norm(p_end)
        if np.linalg.norm(p_end - p_start) < 0.4:
            p_end = -p_start
        touch_dir = rng.normal(size=3)
        touch_dir /= np.linalg.norm(touch_dir)

        def objective(x):
            pts = np.vstack([p_start, x.reshape(-1, 3), p_end])
            kappa = _polyline_curvatures(pts)
            radii = np.linalg.norm(pts, axis=1)
            pen = 400.0 * (radii[m] - 1.0) ** 2
            inner = np.concatenate([radii[1:m - 1], radii[m + 2 : -1]])
            pen += 400.0 * np.square(np.maximum(0.0, inner - (1.0 - gap))).sum()
            pen += 400.0 * np.square(
                np.maximum(0.0, radii[[m - 1, m + 1]] - 1.0)
            ).sum()
            seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
            pen += 30.0 * np.square(seg - seg.mean()).sum()
            return _softmax(kappa) + pen

        result = None
        for _ in range(2):
            init = np.linspace(p_start, p_end, n_vertices)
            bulge = np.sin(np.linspace(0, math.pi, n_vertices))[:, None]
            init = init + bulge * (touch_dir - init[m]) * rng.uniform(0.9, 1.1)
            init += rng.normal(scale=0.02, size=init.shape)
            res = optimize.minimize(
                objective,
                init[1:-1].ravel(),
                method="L-BFGS-B",
                options={"maxiter": 80, "maxfun": 6000},
            )
            if result is None or res.fun < result.fun:
                result = res
        pts = np.vstack([p_start, result.x.reshape(-1, 3), p_end])
        radii = np.linalg.norm(pts, axis=1)
        seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        ok = (
            abs(radii[m] - 1.0) <= 5e-3
            and radii[[0, -1]].max() <= 0.9
            and np.delete(radii, [m - 1, m, m + 1])[1:-1].max() <= 1.0 - 0.5 * gap
            and seg.min() > 1e-4
        )
        if not ok:
            continue
        valid += 1
        kappa_max = float(_polyline_curvatures(pts).max())
        if kappa_max < best:
            best = kappa_max
            best_pts = pts
    candidate = DiscreteCurve(best_pts, closed=False) if best_pts is not None else None
    return ProbeReport(
        best_max_curvature=best,
        candidate=candidate,
        attempts=attempts,
        valid_candidates=valid,
        seed=seed,
    )


def probe_cylinder_lemma(
    attempts: int = 100,
    seed: int = 0,
    cylinder_radius: float = 1.0,
    sphere_offset: float = 0.5,
    n_vertices: int = 19,
) -> ProbeReport:
    """Search for a low-curvature arc in the cylinder that rises above S.

    Arcs start and end on the circle where the reference sphere meets the
    base plane, stay inside the cylinder, and are forced to put their apex
    above the sphere.  In the unit cylinder the lemma predicts no such arc
    with curvature below 1; with a widened cylinder feasible arcs exist and
    their diameters are of interest.
    """
    rng = np.random.default_rng(seed)
    c_s = np.array([0.0, 0.0, -sphere_offset])
    ring = math.sqrt(max(1e-9, 1.0 - sphere_offset**2))
    apex_idx = n_vertices // 2
    top = 1.0 - sphere_offset
    best = math.inf
    best_pts = None
    valid = 0
    for _ in range(attempts):
        a0 = rng.uniform(0, 2 * math.pi)
        a1 = rng.uniform(0, 2 * math.pi)
        p_start = np.array([ring * math.cos(a0), ring * math.sin(a0), 0.0])
        p_end = np.array([ring * math.cos(a1), ring * math.sin(a1), 0.0])
        if np.linalg.norm(p_end - p_start) < 0.3:
            p_end = np.array([-p_start[0], -p_start[1], 0.0])

        def objective(x):
            pts = np.vstack([p_start, x.reshape(-1, 3), p_end])
            kappa = _polyline_curvatures(pts)
            radial = np.linalg.norm(pts[:, :2], axis=1)
            pen = 400.0 * np.square(np.maximum(0.0, radial - cylinder_radius)).sum()
            pen += 400.0 * np.square(np.maximum(0.0, -pts[:, 2])).sum()
            apex = pts[apex_idx]
            w = apex - c_s
            pen += 400.0 * max(0.0, 1.0 + 0.02 - w[2]) ** 2
            pen += 400.0 * max(0.0, np.linalg.norm(w[:2]) - 0.9) ** 2
            seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
            pen += 30.0 * np.square(seg - seg.mean()).sum()
            return _softmax(kappa) + pen

        result = None
        for _ in range(2):
            init = np.linspace(p_start, p_end, n_vertices)
            bulge = np.sin(np.linspace(0, math.pi, n_vertices))[:, None]
            apex_target = np.array([0.0, 0.0, top + 0.05])
            init = init + bulge * (apex_target - init[apex_idx])
            init += rng.normal(scale=0.02, size=init.shape)
            res = optimize.minimize(
                objective,
                init[1:-1].ravel(),
                method="L-BFGS-B",
                options={"maxiter": 80, "maxfun": 6000},
            )
            if result is None or res.fun < result.fun:
                result = res
        pts = np.vstack([p_start, result.x.reshape(-1, 3), p_end])
        radial = np.linalg.norm(pts[:, :2], axis=1)
        w = pts[apex_idx] - c_s
        above = w[2] >= 1.0 and np.linalg.norm(w[:2]) <= 1.0
        inside = radial.max() <= cylinder_radius + 1e-3 and pts[:, 2].min() >= -1e-6
        if not (above and inside):
            continue
        valid += 1
        kappa_max = float(_polyline_curvatures(pts).max())
        if kappa_max < best:
            best = kappa_max
            best_pts = pts
    candidate = DiscreteCurve(best_pts, closed=False) if best_pts is not None else None
    return ProbeReport(
        best_max_curvature=best,
        candidate=candidate,
        attempts=attempts,
        valid_candidates=valid,
        seed=seed,
    )
