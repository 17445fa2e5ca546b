"""Constraint-preserving tube tightening (shrink on no overlap).

Each iteration uniformly shrinks the curve about its centroid, re-equalises
segment lengths, pushes apart vertex pairs closer than the target tube
diameter, and smooths vertices that exceed the curvature bound.  Open
curves can be clamped to a pair of parallel walls with end tangents held
normal to them.  The loop stops when the length stalls or an iteration
budget runs out; everything is deterministic given the config.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict

import numpy as np

from .curve import DiscreteCurve, GeometricReport, discrete_curvature, length, tangents, _resample_points
from .errors import InfeasibleStart, OverlapStuck, PreconditionViolated
from .thickness import geometric_report

__all__ = [
    "TightenConfig",
    "TightenResult",
    "detect_overlaps",
    "remove_overlaps",
    "control_curvature",
    "shrink_step",
    "tighten",
    "tighten_open",
]

#: residual penetration accepted after overlap removal, as a fraction of tau
PENETRATION_TOL = 1e-3
#: curvature slack accepted by the tightening loop
CURVATURE_TOL = 0.02
WINDOW_SLACK = 0.99


@dataclass(frozen=True)
class TightenConfig:
    """Parameters of the tightening loop.

    ``wall_gap`` switches on the open-knot mode: endpoints stay pinned on
    the planes z=0 and z=wall_gap with vertical tangents, and all vertices
    are projected back into the slab every iteration.
    """

    target_thickness: float
    curvature_bound: float = 1.0
    shrink_rate: float = 0.9995
    overlap_push_iters: int = 50
    max_iters: int = 20000
    stall_tolerance: float = 1e-7
    stall_window: int = 1000
    wall_gap: float | None = None
    seed: int = 0
    curvature_sweeps: int = 2
    sample_every: int = 10
    trace_every: int = 0

    def __post_init__(self):
        if not 0.0 < self.target_thickness <= 2.0:
            raise ValueError("target_thickness must lie in (0, 2]")
        if not 0.99 < self.shrink_rate < 1.0:
            raise ValueError("shrink_rate must lie in (0.99, 1)")
        if self.curvature_bound != 1.0:
            raise ValueError("curvature bound is fixed at 1")


@dataclass(frozen=True)
class TightenResult:
    final_curve: DiscreteCurve
    report: GeometricReport
    iterations: int
    converged: bool
    length_history: np.ndarray
    trace: object | None = None


def _overlap_window(curve: DiscreteCurve, tau: float) -> float:
    # within this arc length a curvature-1 curve cannot dip under tau
    return WINDOW_SLACK * math.pi * max(0.5 * tau, curve.h)


def _overlap_arrays(curve: DiscreteCurve, tau: float, window: float | None = None):
    """(i, j, depth) arrays of pairs closer than ``tau`` outside the window."""
    pts = curve.points
    n = curve.n
    w = _overlap_window(curve, tau) if window is None else window
    s = curve.arc_positions()
    comp = np.empty(n, dtype=int)
    for k, (lo, hi) in enumerate(curve.component_slices()):
        comp[lo:hi] = k
    total = length(curve) if curve.closed else math.inf

    sq = np.einsum("ij,ij->i", pts, pts)
    out_i, out_j, out_d = [], [], []
    block = 1024
    for i0 in range(0, n, block):
        i1 = min(n, i0 + block)
        d2 = sq[i0:i1, None] + sq[None, :] - 2.0 * (pts[i0:i1] @ pts.T)
        sep = np.abs(s[None, :] - s[i0:i1, None])
        if curve.closed:
            sep = np.minimum(sep, total - sep)
        close = d2 < tau * tau
        near = close & (sep >= w)
        near |= close & (comp[None, :] != comp[i0:i1, None])
        ri, cj = np.nonzero(near)
        keep = cj > ri + i0
        ri, cj = ri[keep], cj[keep]
        dist = np.sqrt(np.maximum(d2[ri, cj], 0.0))
        out_i.append(ri + i0)
        out_j.append(cj)
        out_d.append(tau - dist)
    ii = np.concatenate(out_i)
    jj = np.concatenate(out_j)
    dd = np.concatenate(out_d)
    good = dd > 0
    ii, jj, dd = ii[good], jj[good], dd[good]
    order = np.lexsort((jj, ii, -dd))
    return ii[order], jj[order], dd[order]


def detect_overlaps(curve: DiscreteCurve, tau: float, window: float | None = None):
    """Vertex pairs closer than ``tau`` outside the arc exclusion window.

    Returns a list of (i, j, depth) with depth = tau - distance, sorted by
    depth descending.  Pairs on different strands are always candidates.
    """
    ii, jj, dd = _overlap_arrays(curve, tau, window)
    return [(int(i), int(j), float(d)) for i, j, d in zip(ii, jj, dd)]


def remove_overlaps(
    curve: DiscreteCurve,
    tau: float,
    max_sweeps: int = 50,
    margin: float | None = None,
    locked=None,
    seed: int = 0,
    on_stuck: str = "raise",
) -> DiscreteCurve:
    """Push overlapping pairs apart along their chords until none remain.

    Pairs are processed deepest-first with immediate position updates, which
    is deterministic.  A locked vertex transfers its share of the push to
    its partner.  If penetrations above ``1e-3 * tau`` survive all sweeps the
    result is OverlapStuck (``on_stuck='raise'``) or the best curve reached
    (``on_stuck='return'``).
    """
    if margin is None:
        margin = 1e-4 * tau
    lock = np.zeros(curve.n, dtype=bool) if locked is None else np.asarray(locked, bool)
    rng = np.random.default_rng(seed)
    pts = curve.points.copy()
    work = curve
    for _ in range(max_sweeps):
        ii, jj, dd = _overlap_arrays(work, tau)
        if len(dd) == 0 or dd[0] <= PENETRATION_TOL * tau:
            return work
        chords = pts[ii] - pts[jj]
        dists = np.linalg.norm(chords, axis=1)
        depth = tau - dists
        degenerate = dists < 1e-12
        if degenerate.any():
            repl = rng.normal(size=(int(degenerate.sum()), 3))
            chords[degenerate] = repl / np.linalg.norm(repl, axis=1, keepdims=True)
            dists[degenerate] = 1.0
        chords /= dists[:, None]
        push = (0.5 * depth + margin)[:, None] * chords
        # a locked vertex transfers its share to the partner; pushes on a
        # vertex are averaged over its pairs so contact bands cannot
        # overshoot by their multiplicity
        w_i = np.where(lock[ii], 0.0, np.where(lock[jj], 2.0, 1.0))
        w_j = np.where(lock[jj], 0.0, np.where(lock[ii], 2.0, 1.0))
        move = np.zeros_like(pts)
        count = np.zeros(len(pts))
        np.add.at(move, ii, w_i[:, None] * push)
        np.add.at(move, jj, -w_j[:, None] * push)
        np.add.at(count, ii, 1.0)
        np.add.at(count, jj, 1.0)
        pts = pts + move / np.maximum(count, 1.0)[:, None]
        work = work.with_points(pts)
        pts = work.points.copy()
    _, _, dd = _overlap_arrays(work, tau)
    if len(dd) and dd[0] > PENETRATION_TOL * tau:
        if on_stuck == "raise":
            raise OverlapStuck(
                f"max penetration {dd[0]:.6f} after {max_sweeps} sweeps"
            )
    return work


def control_curvature(
    curve: DiscreteCurve,
    bound: float = 1.0,
    max_sweeps: int = 50,
    locked=None,
    step_cap: float | None = None,
) -> DiscreteCurve:
    """Relax vertices whose curvature estimate exceeds ``bound``.

    Offending vertices move toward the midpoint of their neighbours by the
    fraction needed to land on the bound, capped at ``step_cap`` (one mean
    segment length by default; scalar or per-vertex array) per sweep.
    Endpoints of open strands never move.
    """
    lock = np.zeros(curve.n, dtype=bool) if locked is None else np.asarray(locked, bool).copy()
    for lo, hi in curve.component_slices():
        if not curve.closed:
            lock[lo] = True
            lock[hi - 1] = True
    pts = curve.points.copy()
    work = curve
    if step_cap is None:
        caps = np.full(curve.n, curve.h)
    else:
        caps = np.broadcast_to(np.asarray(step_cap, dtype=float), (curve.n,))
    for _ in range(max_sweeps):
        kappa_full = np.zeros(work.n)
        offsets = _curvature_per_vertex(work, kappa_full)
        if offsets.max() <= bound:
            return work
        move = np.zeros_like(pts)
        for lo, hi in work.component_slices():
            idx = np.arange(lo, hi)
            if work.closed:
                prev_i = lo + (idx - lo - 1) % (hi - lo)
                next_i = lo + (idx - lo + 1) % (hi - lo)
            else:
                idx = idx[1:-1]
                prev_i = idx - 1
                next_i = idx + 1
            kappa = offsets[idx]
            bad = kappa > bound
            if not bad.any():
                continue
            sel = idx[bad]
            frac = 1.0 - bound / kappa[bad]
            mid = 0.5 * (pts[prev_i[bad]] + pts[next_i[bad]])
            delta = frac[:, None] * (mid - pts[sel])
            norms = np.linalg.norm(delta, axis=1, keepdims=True)
            cap_sel = caps[sel][:, None]
            delta = np.where(norms > cap_sel, delta * (cap_sel / np.maximum(norms, 1e-300)), delta)
            move[sel] += delta
            # a locked offender cannot move: open its angle by steering the
            # free neighbour onto the line continued through the lock
            locked_off = lock[sel]
            for k in np.where(locked_off)[0]:
                i_v, i_p, i_n = sel[k], prev_i[bad][k], next_i[bad][k]
                for nb, other in ((i_n, i_p), (i_p, i_n)):
                    if lock[nb]:
                        continue
                    target = 2.0 * pts[i_v] - pts[other]
                    step = frac[k] * (target - pts[nb])
                    norm = np.linalg.norm(step)
                    if norm > caps[nb]:
                        step *= caps[nb] / norm
                    move[nb] += step
        move[lock] = 0.0
        pts = pts + move
        work = work.with_points(pts)
    return work


def _curvature_per_vertex(curve: DiscreteCurve, out: np.ndarray) -> np.ndarray:
    """Curvature estimate aligned with vertex indices (0 where undefined)."""
    kappa = discrete_curvature(curve)
    pos = 0
    for lo, hi in curve.component_slices():
        if curve.closed:
            out[lo:hi] = kappa[pos : pos + (hi - lo)]
            pos += hi - lo
        else:
            m = hi - lo - 2
            out[lo + 1 : hi - 1] = kappa[pos : pos + m]
            pos += m
    return out


def shrink_step(curve: DiscreteCurve, rate: float) -> DiscreteCurve:
    """Scale all vertices about the centroid; tube radius is unchanged."""
    if not 0.99 < rate <= 1.0:
        raise ValueError("rate must lie in (0.99, 1]")
    centroid = curve.points.mean(axis=0)
    return curve.with_points(centroid + rate * (curve.points - centroid))


# -- the main loop ------------------------------------------------------------


def _equalize(curve: DiscreteCurve, counts) -> DiscreteCurve:
    parts = [
        _resample_points(curve.points[lo:hi], curve.closed, c)
        for (lo, hi), c in zip(curve.component_slices(), counts)
    ]
    breaks = np.cumsum([len(p) for p in parts[:-1]])
    return curve.with_points(np.vstack(parts), breaks=tuple(int(b) for b in breaks))


class _WallClamp:
    """Holds endpoints on z=0 and z=gap with vertical tangents."""

    def __init__(self, curve: DiscreteCurve, gap: float):
        self.gap = gap
        self.ends = []
        for lo, hi in curve.component_slices():
            p0, p1 = curve.points[lo], curve.points[hi - 1]
            for p in (p0, p1):
                if not (abs(p[2]) < 1e-6 or abs(p[2] - gap) < 1e-6):
                    raise PreconditionViolated(
                        f"strand end z={p[2]:.6g} is not on a wall (gap {gap})"
                    )
            t0 = curve.points[lo + 1] - p0
            t1 = p1 - curve.points[hi - 2]
            for t in (t0, t1):
                t = t / np.linalg.norm(t)
                if abs(abs(t[2]) - 1.0) > 1e-6:
                    raise PreconditionViolated("strand end tangent is not wall-normal")
            self.ends.append((lo, hi, p0.copy(), p1.copy()))

    def locked_mask(self, n: int) -> np.ndarray:
        mask = np.zeros(n, dtype=bool)
        for lo, hi, _, _ in self.ends:
            mask[lo] = mask[hi - 1] = True
        return mask

    def apply(self, curve: DiscreteCurve) -> DiscreteCurve:
        pts = curve.points.copy()
        pts[:, 2] = np.clip(pts[:, 2], 0.0, self.gap)
        h = curve.h
        for lo, hi, p0, p1 in self.ends:
            pts[lo] = p0
            pts[hi - 1] = p1
            up0 = 1.0 if p0[2] < 0.5 * self.gap else -1.0
            up1 = 1.0 if p1[2] < 0.5 * self.gap else -1.0
            pts[lo + 1] = p0 + np.array([0.0, 0.0, up0 * h])
            pts[hi - 2] = p1 + np.array([0.0, 0.0, up1 * h])
        return curve.with_points(pts)


def _constraints_ok(curve: DiscreteCurve, cfg: TightenConfig) -> bool:
    kappa = discrete_curvature(curve)
    if kappa.size and kappa.max() > cfg.curvature_bound + CURVATURE_TOL:
        return False
    _, _, dd = _overlap_arrays(curve, cfg.target_thickness)
    return len(dd) == 0 or dd[0] <= PENETRATION_TOL * cfg.target_thickness


def tighten(curve: DiscreteCurve, config: TightenConfig) -> TightenResult:
    """Tighten a curve toward minimal length at fixed tube thickness.

    The curve must satisfy the constraints at the start, possibly after a
    pre-repair phase of overlap removal and curvature smoothing; otherwise
    InfeasibleStart is raised.  Deterministic given the config.
    """
    from .fileio import IsotopyTrace  # local import, fileio depends on curve only

    tau = config.target_thickness
    clamp = None
    if config.wall_gap is not None:
        if curve.closed:
            raise PreconditionViolated("wall clamping applies to open curves")
        clamp = _WallClamp(curve, config.wall_gap)
    counts = [hi - lo for lo, hi in curve.component_slices()]
    locked = clamp.locked_mask(curve.n) if clamp else None

    state = _equalize(curve, counts)
    if clamp:
        state = clamp.apply(state)

    def smooth(cur, probe=None, base_sweeps=3):
        # near strand contacts the smoothing steps stay small and few, so
        # they cannot bulldoze the contact set; elsewhere they run freely
        h = cur.h
        ii, jj, _ = _overlap_arrays(cur, (tau if probe is None else probe) + 2.0 * h)
        caps = np.full(cur.n, h)
        caps[ii] = 0.15 * h
        caps[jj] = 0.15 * h
        sweeps = base_sweeps if len(ii) else max(base_sweeps, 20)
        return control_curvature(
            cur, config.curvature_bound, max_sweeps=sweeps, locked=locked, step_cap=caps
        )

    def touch_up(cur, rounds):
        # shrink-free constraint consolidation; reported states satisfy the
        # curvature and penetration bounds even when the in-flight loop
        # carries small transients
        for _ in range(rounds):
            if _constraints_ok(cur, config):
                break
            cur = smooth(cur)
            cur = remove_overlaps(
                cur, tau, max_sweeps=200,
                locked=locked, seed=config.seed, on_stuck="return",
            )
            if clamp:
                cur = clamp.apply(cur)
        return cur

    # pre-repair: no shrinking, gentle curvature passes, and full overlap
    # resolution with the tube inflated progressively toward the target;
    # squeezed contact bands need the propagation room
    repaired = _constraints_ok(state, config)
    for _ in range(400):
        if repaired:
            break
        _, _, dd = _overlap_arrays(state, tau)
        tau_eff = min(tau, (tau - dd[0]) + 0.06 * tau) if len(dd) else tau
        state = smooth(state, tau_eff)
        state = remove_overlaps(
            state, tau_eff, max_sweeps=200,
            locked=locked, seed=config.seed, on_stuck="return",
        )
        state = _equalize(state, counts)
        if clamp:
            state = clamp.apply(state)
        repaired = _constraints_ok(state, config)
    if not repaired:
        raise InfeasibleStart("pre-repair failed to reach an admissible state")

    lengths = [length(state)]
    history = [lengths[0]]
    frames = []
    reports = []
    stalled = False
    iteration = 0
    for iteration in range(1, config.max_iters + 1):
        state = shrink_step(state, config.shrink_rate)
        state = _equalize(state, counts)
        state = smooth(state, base_sweeps=config.curvature_sweeps)
        state = remove_overlaps(
            state, tau, max_sweeps=config.overlap_push_iters,
            locked=locked, seed=config.seed, on_stuck="return",
        )
        if clamp:
            state = clamp.apply(state)
        L = length(state)
        lengths.append(L)
        if iteration % config.sample_every == 0:
            state = touch_up(state, 60)
            history.append(length(state))
        if config.trace_every and iteration % config.trace_every == 0:
            state = touch_up(state, 60)
            frames.append(state)
            reports.append(geometric_report(state))
        if iteration >= config.stall_window:
            past = lengths[iteration - config.stall_window]
            if abs(past - L) / max(L, 1e-30) < config.stall_tolerance:
                stalled = True
                break

    # exit touch-up: shrink-free repair rounds until both constraints hold,
    # so the returned curve is never in worse standing than the entry state
    state = touch_up(state, 500)
    history.append(length(state))
    report = geometric_report(state)
    converged = stalled and _constraints_ok(state, config)
    trace = None
    if config.trace_every:
        frames.append(state)
        reports.append(report)
        trace = IsotopyTrace(
            frames=tuple(frames),
            reports=tuple(reports),
            metadata={"config": asdict(config), "stage": "tighten", "seed": config.seed},
        )
    return TightenResult(
        final_curve=state,
        report=report,
        iterations=iteration,
        converged=converged,
        length_history=np.asarray(history),
        trace=trace,
    )


def tighten_open(core: DiscreteCurve, config: TightenConfig) -> TightenResult:
    """Tighten a wall-clamped open core (wall_gap must be set)."""
    if config.wall_gap is None:
        raise PreconditionViolated("tighten_open needs a wall_gap in the config")
    if core.closed:
        raise PreconditionViolated("tighten_open expects an open curve")
    return tighten(core, config)
