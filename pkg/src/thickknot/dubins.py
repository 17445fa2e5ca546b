"""Planar shortest paths under a unit curvature bound.

Paths are concatenations of unit-radius arcs (L/R) and straight segments
(S); the shortest connector between two oriented points is one of the six
classical words LSL, RSR, LSR, RSL, LRL, RLR.  Candidates are built by
tangent construction on the turning circles rather than closed-form
trigonometry, then the shortest is kept.  The caps that close double-strand
cores into a single loop are synthesised here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curve import Configuration, DiscreteCurve, resample
from .errors import CapCollision, Infeasible, NonPlanarInput, PreconditionViolated
from .frames import any_unit_normal

__all__ = [
    "DubinsSegment",
    "DubinsPath",
    "solve_dubins",
    "close_open_curve",
    "derive_cap_configurations",
]

_PLANAR_TOL = 1e-9


def _mod2pi(a: float) -> float:
    a = a % (2.0 * math.pi)
    if a > 2.0 * math.pi - 1e-9:
        return 0.0
    return a


def _rot90(v: np.ndarray) -> np.ndarray:
    return np.array([-v[1], v[0]])


@dataclass(frozen=True)
class DubinsSegment:
    """One primitive: 'L'/'R' arc of radius 1, or 'S' straight.

    ``start`` and ``heading`` give the entry point and direction in plane
    coordinates; arcs also carry their ``center``.  ``length`` equals the
    swept angle for arcs.
    """

    kind: str
    length: float
    signed_curvature: int
    start: tuple
    heading: float
    center: tuple | None = None

    def point_at(self, s: float) -> np.ndarray:
        if self.kind == "S":
            d = np.array([math.cos(self.heading), math.sin(self.heading)])
            return np.asarray(self.start) + s * d
        c = np.asarray(self.center)
        a0 = math.atan2(self.start[1] - c[1], self.start[0] - c[0])
        a = a0 + self.signed_curvature * s
        return c + np.array([math.cos(a), math.sin(a)])

    def heading_at(self, s: float) -> float:
        if self.kind == "S":
            return self.heading
        return self.heading + self.signed_curvature * s


@dataclass(frozen=True)
class PlaneFrame:
    """Embedding of the 2D working plane in space."""

    origin: np.ndarray
    u: np.ndarray
    v: np.ndarray

    def to_3d(self, xy: np.ndarray) -> np.ndarray:
        xy = np.atleast_2d(xy)
        return self.origin + xy[:, :1] * self.u + xy[:, 1:2] * self.v

    def direction_to_3d(self, heading: float) -> np.ndarray:
        return math.cos(heading) * self.u + math.sin(heading) * self.v


@dataclass(frozen=True)
class DubinsPath:
    """Shortest curvature-bounded planar connector between two configurations."""

    segments: tuple
    total_length: float
    plane: PlaneFrame
    word: str

    @property
    def family(self) -> str:
        return "CCC" if self.word in ("LRL", "RLR") else "CSC"

    def sample(self, spacing: float) -> np.ndarray:
        """3D polyline along the path, endpoints included."""
        if not self.segments:
            return self.plane.to_3d(np.zeros((1, 2)))
        pts = []
        for k, seg in enumerate(self.segments):
            m = max(1, int(math.ceil(seg.length / spacing)))
            ss = np.linspace(0.0, seg.length, m + 1)
            if k > 0:
                ss = ss[1:]
            pts.extend(seg.point_at(s) for s in ss)
        return self.plane.to_3d(np.array(pts))

    def end_tangents(self) -> tuple:
        """Unit 3D tangents at the path start and end."""
        first, last = self.segments[0], self.segments[-1]
        return (
            self.plane.direction_to_3d(first.heading_at(0.0)),
            self.plane.direction_to_3d(last.heading_at(last.length)),
        )


def _plane_frame(start: Configuration, end: Configuration) -> PlaneFrame:
    d = end.position - start.position
    t0, t1 = start.tangent, end.tangent
    normal = np.cross(t0, t1)
    if np.linalg.norm(normal) < 1e-12:
        normal = np.cross(t0, d)
    if np.linalg.norm(normal) < 1e-12:
        normal = np.cross(t0, any_unit_normal(t0))
    normal /= np.linalg.norm(normal)
    scale = 1.0 + np.linalg.norm(d)
    for vec, what in ((d, "displacement"), (t0, "start tangent"), (t1, "end tangent")):
        if abs(float(np.dot(vec, normal))) > _PLANAR_TOL * scale:
            raise NonPlanarInput(f"{what} leaves the common plane")
    u = t0 / np.linalg.norm(t0)
    v = np.cross(normal, u)
    return PlaneFrame(origin=start.position.copy(), u=u, v=v)


def _make_arc(kind, p, heading, angle):
    sigma = 1 if kind == "L" else -1
    d = np.array([math.cos(heading), math.sin(heading)])
    center = p + sigma * _rot90(d)
    return DubinsSegment(kind, angle, sigma, (float(p[0]), float(p[1])), heading, (float(center[0]), float(center[1])))


def _make_line(p, heading, s):
    return DubinsSegment("S", s, 0, (float(p[0]), float(p[1])), heading)


def _csc_candidates(p0, th0, p1, th1, word):
    sig0 = 1 if word[0] == "L" else -1
    sig1 = 1 if word[2] == "L" else -1
    d0 = np.array([math.cos(th0), math.sin(th0)])
    d1 = np.array([math.cos(th1), math.sin(th1)])
    c0 = p0 + sig0 * _rot90(d0)
    c1 = p1 + sig1 * _rot90(d1)
    dc = c1 - c0
    dist = float(np.linalg.norm(dc))
    out = []
    if sig0 == sig1:
        if dist < 1e-12:
            t = _mod2pi(sig0 * (th1 - th0))
            out.append((t, 0.0, 0.0, None))
            psi_list = []
        else:
            psi_list = [math.atan2(dc[1], dc[0])]
            s_len = dist
    else:
        if dist < 2.0:
            return []
        phi = math.atan2(dc[1], dc[0])
        psi_list = [phi + math.asin(2.0 * sig0 / dist)]
        s_len = math.sqrt(dist * dist - 4.0)
    for psi in psi_list:
        t = _mod2pi(sig0 * (psi - th0))
        q = _mod2pi(sig1 * (th1 - psi))
        out.append((t, s_len, q, psi))
    cands = []
    for t, s_len, q, psi in out:
        segs = []
        pos = p0
        heading = th0
        if t > 0:
            segs.append(_make_arc(word[0], pos, heading, t))
            pos = segs[-1].point_at(t)
            heading = heading + sig0 * t
        if s_len > 0:
            segs.append(_make_line(pos, psi if psi is not None else heading, s_len))
            pos = segs[-1].point_at(s_len)
            heading = psi if psi is not None else heading
        if q > 0:
            segs.append(_make_arc(word[2], pos, heading, q))
        cands.append((t + s_len + q, tuple(segs)))
    return cands


def _ccc_candidates(p0, th0, p1, th1, word):
    sig = 1 if word[0] == "L" else -1
    d0 = np.array([math.cos(th0), math.sin(th0)])
    d1 = np.array([math.cos(th1), math.sin(th1)])
    c0 = p0 + sig * _rot90(d0)
    c2 = p1 + sig * _rot90(d1)
    dc = c2 - c0
    dist = float(np.linalg.norm(dc))
    if dist > 4.0 or dist < 1e-12:
        return []
    mid = 0.5 * (c0 + c2)
    half = 0.5 * dist
    perp = _rot90(dc / dist)
    offset = math.sqrt(max(0.0, 4.0 - half * half))
    cands = []
    for sign in (1.0, -1.0):
        m = mid + sign * offset * perp
        t1p = 0.5 * (c0 + m)
        t2p = 0.5 * (c2 + m)
        r1 = t1p - c0
        psi1 = math.atan2(sig * r1[0], -sig * r1[1])  # heading of sigma*J*r1
        r2 = t2p - m
        psi2 = math.atan2(-sig * r2[0], sig * r2[1])  # middle turn is -sigma
        t = _mod2pi(sig * (psi1 - th0))
        p = _mod2pi(-sig * (psi2 - psi1))
        q = _mod2pi(sig * (th1 - psi2))
        segs = []
        pos = p0
        heading = th0
        if t > 0:
            segs.append(_make_arc(word[0], pos, heading, t))
            pos = segs[-1].point_at(t)
            heading += sig * t
        segs.append(_make_arc(word[1], pos, heading, p))
        pos = segs[-1].point_at(p)
        heading -= sig * p
        if q > 0:
            segs.append(_make_arc(word[2], pos, heading, q))
        cands.append((t + p + q, tuple(segs)))
    return cands


_WORDS = ("LRL", "RLR", "LSL", "RSR", "LSR", "RSL")


def solve_dubins(start: Configuration, end: Configuration) -> DubinsPath:
    """Shortest unit-curvature planar path between two oriented points.

    The configurations must be a planar problem: both tangents and the
    displacement vector in one plane.  Ties between equal-length words go to
    CCC first, then lexicographic, for determinism.
    """
    frame = _plane_frame(start, end)
    d3 = end.position - start.position
    p0 = np.zeros(2)
    p1 = np.array([float(np.dot(d3, frame.u)), float(np.dot(d3, frame.v))])
    th0 = 0.0
    th1 = math.atan2(float(np.dot(end.tangent, frame.v)), float(np.dot(end.tangent, frame.u)))

    if np.linalg.norm(p1) < 1e-12 and abs(_mod2pi(th1)) < 1e-12:
        return DubinsPath(segments=(), total_length=0.0, plane=frame, word="")

    candidates = []
    for word in _WORDS:
        if word[1] == "S":
            cands = _csc_candidates(p0, th0, p1, th1, word)
        else:
            cands = _ccc_candidates(p0, th0, p1, th1, word)
        for total, segs in cands:
            candidates.append((total, word, segs))
    if not candidates:
        raise Infeasible("no Dubins candidate found")  # unreachable for planar data
    best_len = min(c[0] for c in candidates)
    close = [c for c in candidates if c[0] <= best_len + 1e-9]
    close.sort(key=lambda c: (0 if c[1] in ("LRL", "RLR") else 1, c[1], c[0]))
    total, word, segs = close[0]
    return DubinsPath(segments=segs, total_length=total, plane=frame, word=word)


# -- closing double-strand cores with caps -----------------------------------


def _end_tangent(points, at_start):
    if at_start:
        d = points[1] - points[0]
    else:
        d = points[-1] - points[-2]
    return d / np.linalg.norm(d)


def derive_cap_configurations(core: DiscreteCurve):
    """Cap endpoint data implied by a two-strand open core.

    Returns two (from, to) configuration pairs, in the traversal order of
    the final loop: strand 0 forward, far cap, strand 1 backward, near cap.
    """
    comps = core.components()
    if core.closed or len(comps) != 2:
        raise PreconditionViolated("core must be an open record with two strands")
    a, b = comps
    far = (
        Configuration(a.points[-1], _end_tangent(a.points, False)),
        Configuration(b.points[-1], -_end_tangent(b.points, False)),
    )
    near = (
        Configuration(b.points[0], -_end_tangent(b.points, True)),
        Configuration(a.points[0], _end_tangent(a.points, True)),
    )
    return far, near


def close_open_curve(core: DiscreteCurve, end_pairs) -> DiscreteCurve:
    """Close a two-strand open core into a single loop with Dubins caps.

    ``end_pairs`` are the two (from, to) configuration pairs the caps must
    realise; they are validated against the strand ends to 1e-6.  Raises
    CapCollision if a sampled cap comes closer than the tube diameter to the
    rest of the curve (junction neighbourhoods excluded).
    """
    derived = derive_cap_configurations(core)
    for given_pair, derived_pair in zip(end_pairs, derived):
        for given, want in zip(given_pair, derived_pair):
            if np.linalg.norm(given.position - want.position) > 1e-6:
                raise PreconditionViolated("cap endpoint does not match a strand end")
            if np.linalg.norm(given.tangent - want.tangent) > 1e-6:
                raise PreconditionViolated("cap tangent does not match a strand end")
    (far_pair, near_pair) = end_pairs
    h = core.h
    cap_far = solve_dubins(*far_pair)
    cap_near = solve_dubins(*near_pair)
    comps = core.components()
    pts_far = cap_far.sample(h)
    pts_near = cap_near.sample(h)

    tau = core.tube_diameter
    if tau > 0:
        window = math.pi * max(core.tube_radius, h)
        for cap_pts, pair in ((pts_far, far_pair), (pts_near, near_pair)):
            interior = _cap_interior(cap_pts, h, window)
            if interior.size == 0:
                continue
            keep = np.ones(core.n, dtype=bool)
            for cfg in pair:
                d_end = np.linalg.norm(core.points - cfg.position, axis=1)
                keep &= d_end > window
            if keep.any():
                d = np.linalg.norm(
                    interior[:, None, :] - core.points[None, keep, :], axis=2
                )
                if d.min() < tau - 1e-6:
                    raise CapCollision(
                        f"cap approaches core to {d.min():.4f} < tube diameter {tau:.4f}"
                    )

    loop = np.vstack(
        [
            comps[0].points,
            pts_far[1:-1],
            comps[1].points[::-1],
            pts_near[1:-1],
        ]
    )
    out = DiscreteCurve(loop, closed=True, tube_radius=core.tube_radius)
    return resample(out, out.n)


def _cap_interior(cap_pts: np.ndarray, h: float, window: float) -> np.ndarray:
    """Cap samples further than ``window`` of arc length from either end."""
    seg = np.linalg.norm(np.diff(cap_pts, axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    total = s[-1]
    mask = (s > window) & (s < total - window)
    return cap_pts[mask]
