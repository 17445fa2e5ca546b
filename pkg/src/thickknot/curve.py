"""Discrete curves with tube thickness.

A curve is an ordered 3D polyline, closed or open, normalised so that the
minimum admissible turning radius is 1 (curvature bound 1, tube diameter
at most 2).  Open records may carry several strands ("components") split at
``breaks``; closed curves are always a single component.

All values are immutable once constructed and safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DegenerateCurve

__all__ = [
    "DiscreteCurve",
    "Configuration",
    "GeometricReport",
    "resample",
    "discrete_curvature",
    "length",
    "diameter",
    "perturb",
    "tangents",
]

#: +infinity sentinel used for r2 when a curve has no doubly critical pairs.
INF = math.inf


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError(f"points must have shape (n, 3), got {pts.shape}")
    return pts


@dataclass(frozen=True)
class DiscreteCurve:
    """Ordered polyline with a tube radius.

    Parameters
    ----------
    points : (n, 3) array
        Vertex positions in curvature-normalised length units.
    closed : bool
        Whether the last vertex connects back to the first.
    tube_radius : float
        Tube radius r in [0, 1]; the tube diameter is tau = 2 r.
    breaks : tuple of int
        Start indices of additional strands for multi-component open
        records (empty for ordinary curves).  Closed curves cannot have
        breaks.
    """

    points: np.ndarray
    closed: bool = True
    tube_radius: float = 0.0
    breaks: tuple = ()

    def __post_init__(self):
        pts = _as_points(self.points)
        pts = pts.copy()
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "breaks", tuple(int(b) for b in self.breaks))
        if self.closed and self.breaks:
            raise ValueError("closed curves cannot carry component breaks")
        if not 0.0 <= self.tube_radius <= 1.0:
            raise ValueError(f"tube_radius must lie in [0, 1], got {self.tube_radius}")
        n_min = 8 if self.closed else 2
        for lo, hi in self.component_slices():
            if hi - lo < n_min:
                raise ValueError(
                    f"component of {hi - lo} points is below the minimum of {n_min}"
                )
        if self.breaks:
            b = np.asarray(self.breaks)
            if np.any(b <= 0) or np.any(b >= len(pts)) or np.any(np.diff(b) <= 0):
                raise ValueError(f"invalid break indices {self.breaks}")
        for lo, hi in self.component_slices():
            seg = np.linalg.norm(np.diff(pts[lo:hi], axis=0), axis=1)
            if seg.size and seg.min() <= 0.0:
                raise ValueError("consecutive points must be distinct")

    # -- basic measurements -------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def tube_diameter(self) -> float:
        return 2.0 * self.tube_radius

    def component_slices(self) -> list[tuple[int, int]]:
        """Half-open index ranges of the strands, in storage order."""
        bounds = [0, *self.breaks, len(self.points)]
        return [(bounds[i], bounds[i + 1]) for i in range(len(bounds) - 1)]

    def components(self) -> list["DiscreteCurve"]:
        """Each strand as a standalone open curve (identity for 1 strand)."""
        if not self.breaks:
            return [self]
        return [
            DiscreteCurve(self.points[lo:hi], closed=False, tube_radius=self.tube_radius)
            for lo, hi in self.component_slices()
        ]

    def segment_lengths(self) -> np.ndarray:
        """Lengths of every polyline segment, closing segment included."""
        out = []
        for lo, hi in self.component_slices():
            pts = self.points[lo:hi]
            seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
            if self.closed:
                seg = np.append(seg, np.linalg.norm(pts[0] - pts[-1]))
            out.append(seg)
        return np.concatenate(out)

    @property
    def h(self) -> float:
        """Mean segment length (the discretisation scale)."""
        return float(self.segment_lengths().mean())

    def arc_positions(self) -> np.ndarray:
        """Cumulative arc length at every vertex (per component, restarting)."""
        out = np.empty(self.n)
        for lo, hi in self.component_slices():
            seg = np.linalg.norm(np.diff(self.points[lo:hi], axis=0), axis=1)
            out[lo:hi] = np.concatenate([[0.0], np.cumsum(seg)])
        return out

    def with_points(self, points, breaks=None) -> "DiscreteCurve":
        """Copy carrying new vertex data (same closed flag and radius)."""
        return replace(
            self,
            points=_as_points(points),
            breaks=self.breaks if breaks is None else tuple(breaks),
        )


@dataclass(frozen=True)
class Configuration:
    """Oriented point: a position together with a unit tangent."""

    position: np.ndarray
    tangent: np.ndarray

    def __post_init__(self):
        pos = np.asarray(self.position, dtype=float).reshape(3).copy()
        tan = np.asarray(self.tangent, dtype=float).reshape(3).copy()
        norm = np.linalg.norm(tan)
        if norm == 0.0:
            raise ValueError("tangent must be nonzero")
        tan /= norm
        pos.flags.writeable = False
        tan.flags.writeable = False
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "tangent", tan)

    def reversed(self) -> "Configuration":
        return Configuration(self.position, -self.tangent)


@dataclass(frozen=True)
class GeometricReport:
    """Measured invariants of a curve.

    ``r2`` is the minimal doubly-critical chord length and may be the
    +infinity sentinel; ``thickness`` is min(2, r2) and is always finite.
    """

    length: float
    max_curvature: float
    r2: float
    thickness: float
    diameter: float


# -- elementary estimators --------------------------------------------------


def length(curve: DiscreteCurve) -> float:
    """Total polyline length, closing segment included for closed curves."""
    return float(curve.segment_lengths().sum())


def diameter(curve: DiscreteCurve) -> float:
    """Maximum pairwise vertex distance.

    Blocked O(n^2) scan; blocks may run on several threads (see
    THICKKNOT_THREADS), and the max reduction is order-independent, so the
    result is bit-identical either way.
    """
    from .parallel import blocked_map

    pts = curve.points
    block = 1024
    starts = range(0, len(pts), block)

    def block_max(i):
        chunk = pts[i : i + block]
        d2 = np.sum((chunk[:, None, :] - pts[None, :, :]) ** 2, axis=2)
        return float(d2.max())

    return math.sqrt(max(blocked_map(block_max, list(starts))))


def tangents(curve: DiscreteCurve) -> np.ndarray:
    """Unit tangent estimate at every vertex.

    Central differences at interior (and all closed-curve) vertices,
    one-sided at open component ends.
    """
    out = np.empty_like(curve.points)
    for lo, hi in curve.component_slices():
        pts = curve.points[lo:hi]
        if curve.closed:
            diff = np.roll(pts, -1, axis=0) - np.roll(pts, 1, axis=0)
        else:
            diff = np.empty_like(pts)
            diff[1:-1] = pts[2:] - pts[:-2]
            diff[0] = pts[1] - pts[0]
            diff[-1] = pts[-1] - pts[-2]
        norms = np.linalg.norm(diff, axis=1, keepdims=True)
        out[lo:hi] = diff / norms
    return out


def discrete_curvature(curve: DiscreteCurve) -> np.ndarray:
    """Circumscribed-circle curvature estimate per vertex.

    At vertex i the estimate is 2 sin(phi/2) / l where phi is the turning
    angle between the adjacent segments and l their mean length.  Returns
    one value per vertex for closed curves and per interior vertex for each
    open component (concatenated in storage order).
    """
    out = []
    for lo, hi in curve.component_slices():
        pts = curve.points[lo:hi]
        if curve.closed:
            prev = np.roll(pts, 1, axis=0)
            nxt = np.roll(pts, -1, axis=0)
            a = pts - prev
            b = nxt - pts
        else:
            a = pts[1:-1] - pts[:-2]
            b = pts[2:] - pts[1:-1]
        la = np.linalg.norm(a, axis=1)
        lb = np.linalg.norm(b, axis=1)
        cosphi = np.einsum("ij,ij->i", a, b) / (la * lb)
        cosphi = np.clip(cosphi, -1.0, 1.0)
        # 2 sin(phi/2) = sqrt(2 (1 - cos phi)), numerically stable near 0
        out.append(np.sqrt(2.0 * (1.0 - cosphi)) / (0.5 * (la + lb)))
    return np.concatenate(out) if out else np.empty(0)


# -- resampling and perturbation --------------------------------------------


def _resample_points(pts: np.ndarray, closed: bool, n: int) -> np.ndarray:
    if closed:
        loop = np.vstack([pts, pts[:1]])
    else:
        loop = pts
    seg = np.linalg.norm(np.diff(loop, axis=0), axis=1)
    total = seg.sum()
    if total <= 0.0:
        raise DegenerateCurve("curve has zero length")
    s = np.concatenate([[0.0], np.cumsum(seg)])

    def place(params):
        cols = [np.interp(params, s, loop[:, k]) for k in range(3)]
        return np.stack(cols, axis=1)

    if closed:
        u = np.arange(n) * (total / n)
    else:
        u = np.linspace(0.0, total, n)
    # iterate until the output chords are uniform, which makes resampling a
    # projection: already-uniform input comes back unchanged to float noise
    for _ in range(12):
        out = place(u)
        if closed:
            chords = np.linalg.norm(np.diff(np.vstack([out, out[:1]]), axis=0), axis=1)
        else:
            chords = np.linalg.norm(np.diff(out, axis=0), axis=1)
        ctot = chords.sum()
        if np.abs(chords - ctot / len(chords)).max() < 1e-13 * ctot:
            break
        cum = np.concatenate([[0.0], np.cumsum(chords)])
        if closed:
            targets = np.arange(n) * (ctot / n)
            u = np.interp(targets, cum, np.append(u, total))
        else:
            targets = np.linspace(0.0, ctot, n)
            u = np.interp(targets, cum, u)
    out = place(u)
    if not closed:
        # endpoints are structural; pin them against interp rounding
        out[0] = pts[0]
        out[-1] = pts[-1]
    return out


def resample(curve: DiscreteCurve, n: int) -> DiscreteCurve:
    """Redistribute vertices uniformly in arc length.

    For multi-component records ``n`` is the total count, split between
    strands proportionally to their lengths (at least 2 vertices each).
    Closed output keeps the original starting vertex, which makes
    resampling idempotent up to floating error.
    """
    n = int(n)
    slices = curve.component_slices()
    if curve.closed and n < 8:
        raise ValueError("closed curves need at least 8 points")
    if n < 2 * len(slices):
        raise ValueError("too few points for the number of components")
    if len(slices) == 1:
        return curve.with_points(_resample_points(curve.points, curve.closed, n))
    lengths = [
        float(np.linalg.norm(np.diff(curve.points[lo:hi], axis=0), axis=1).sum())
        for lo, hi in slices
    ]
    total = sum(lengths)
    counts = [max(2, int(round(n * L / total))) for L in lengths]
    counts[-1] = max(2, n - sum(counts[:-1]))
    parts = [
        _resample_points(curve.points[lo:hi], False, c)
        for (lo, hi), c in zip(slices, counts)
    ]
    breaks = np.cumsum([len(p) for p in parts[:-1]])
    return curve.with_points(np.vstack(parts), breaks=tuple(int(b) for b in breaks))


def perturb(curve: DiscreteCurve, amplitude: float, seed: int) -> DiscreteCurve:
    """Displace every vertex by at most ``amplitude``, deterministically.

    Closure and near-uniform spacing are restored by resampling to the same
    vertex count, so output vertices stay within ``amplitude`` of the input
    polyline.
    """
    if amplitude < 0:
        raise ValueError("amplitude must be nonnegative")
    if amplitude == 0.0:
        return curve
    rng = np.random.default_rng(seed)
    direction = rng.normal(size=curve.points.shape)
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    radius = rng.uniform(0.0, amplitude, size=(curve.n, 1))
    moved = curve.with_points(curve.points + radius * direction)
    return resample(moved, curve.n)
