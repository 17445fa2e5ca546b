"""Independent brute-force oracles used to validate the fast paths.

Everything here is deliberately dumb and slow: plain loops, grid scans,
Monte-Carlo sampling.  Nothing imports the implementation being checked
beyond basic data containers.
"""

import math

import numpy as np


# -- doubly critical chords: O(n^2) rescan with its own tangent code ----------


def brute_tangents(points, closed):
    n = len(points)
    out = np.zeros((n, 3))
    for i in range(n):
        if closed:
            a = points[(i - 1) % n]
            b = points[(i + 1) % n]
        elif i == 0:
            a, b = points[0], points[1]
        elif i == n - 1:
            a, b = points[n - 2], points[n - 1]
        else:
            a, b = points[i - 1], points[i + 1]
        d = np.asarray(b) - np.asarray(a)
        out[i] = d / np.linalg.norm(d)
    return out


def brute_doubly_critical(points, closed, tube_radius, ortho_tol=0.05, window=None):
    """All admissible locally-shortest near-orthogonal chords, brute force.

    Same admissibility definition as the production scan (residual below
    tolerance, arc separation at least the window, chord locally minimal
    over the 8 index neighbours within the admissible set), reimplemented
    with plain loops.
    """
    points = np.asarray(points, float)
    n = len(points)
    tang = brute_tangents(points, closed)
    seg = [np.linalg.norm(points[(i + 1) % n] - points[i]) for i in range(n if closed else n - 1)]
    s = [0.0]
    for i in range(n - 1):
        s.append(s[-1] + seg[i])
    total = s[-1] + (seg[-1] if closed else 0.0)
    h = total / len(seg)
    if window is None:
        window = 0.99 * math.pi * max(tube_radius, h)

    def separation(i, j):
        d = abs(s[i] - s[j])
        return min(d, total - d) if closed else d

    admissible = {}
    for i in range(n):
        for j in range(i + 1, n):
            if separation(i, j) < window:
                continue
            chord = points[j] - points[i]
            dist = np.linalg.norm(chord)
            if dist == 0.0:
                continue
            res = max(abs(chord @ tang[i]), abs(chord @ tang[j])) / dist
            if res <= ortho_tol:
                admissible[(i, j)] = float(dist)

    def nb(k, step):
        k2 = k + step
        if closed:
            return k2 % n
        return k2 if 0 <= k2 < n else None

    out = []
    for (i, j), dist in admissible.items():
        ok = True
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                if di == dj == 0:
                    continue
                i2 = nb(i, di)
                j2 = nb(j, dj)
                if i2 is None or j2 is None or i2 == j2:
                    continue
                key = (i2, j2) if i2 < j2 else (j2, i2)
                if key in admissible and admissible[key] < dist:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append((i, j, dist))
    out.sort(key=lambda t: (t[2], t[0], t[1]))
    return out


def brute_r2(points, closed, tube_radius, ortho_tol=0.05, window=None):
    pairs = brute_doubly_critical(points, closed, tube_radius, ortho_tol, window)
    return pairs[0][2] if pairs else math.inf


# -- Dubins grid oracle: 1D root scans over the first-arc angle ---------------


def _rot90(v):
    return np.array([-v[1], v[0]])


def _heading(a):
    return np.array([math.cos(a), math.sin(a)])


def _mod2pi(a):
    a = a % (2.0 * math.pi)
    return 0.0 if a > 2.0 * math.pi - 1e-12 else a


def dubins_grid_oracle(p0, th0, p1, th1, grid=62832):
    """Shortest unit-radius path length by scanning the first arc angle.

    For each of the six words the residual function of the first-arc angle
    is scanned on a uniform grid and roots are refined by bisection; the
    minimum candidate length is returned.  Construction is independent of
    the closed-form/tangent solver.
    """
    p0 = np.asarray(p0, float)
    p1 = np.asarray(p1, float)
    ts = np.linspace(0.0, 2.0 * math.pi, grid, endpoint=False)
    best = math.inf

    for sig0 in (1, -1):
        c1 = p0 + sig0 * _rot90(_heading(th0))
        for sig2 in (1, -1):
            c3 = p1 + sig2 * _rot90(_heading(th1))
            psi = th0 + sig0 * ts
            hx, hy = np.cos(psi), np.sin(psi)
            ax = c1[0] + sig0 * hy
            ay = c1[1] - sig0 * hx
            ex = c3[0] + sig2 * hy
            ey = c3[1] - sig2 * hx
            f = hx * (ey - ay) - hy * (ex - ax)
            s_dot = hx * (ex - ax) + hy * (ey - ay)
            for k in np.where(np.signbit(f) != np.signbit(np.roll(f, -1)))[0]:
                lo, hi = ts[k], ts[k] + (ts[1] - ts[0])

                def fval(t):
                    ps = th0 + sig0 * t
                    h = _heading(ps)
                    a = c1 - sig0 * _rot90(h)
                    e = c3 - sig2 * _rot90(h)
                    return h[0] * (e - a)[1] - h[1] * (e - a)[0]

                flo = fval(lo)
                for _ in range(60):
                    mid = 0.5 * (lo + hi)
                    fm = fval(mid)
                    if (fm < 0) == (flo < 0):
                        lo, flo = mid, fm
                    else:
                        hi = mid
                t = 0.5 * (lo + hi)
                ps = th0 + sig0 * t
                h = _heading(ps)
                a = c1 - sig0 * _rot90(h)
                e = c3 - sig2 * _rot90(h)
                s_len = float(h @ (e - a))
                if s_len < -1e-9:
                    continue
                q = _mod2pi(sig2 * (th1 - ps))
                best = min(best, t + max(s_len, 0.0) + q)

        # CCC with the same outer turn sig0 on both ends
        c3 = p1 + sig0 * _rot90(_heading(th1))
        psi = th0 + sig0 * ts
        hx, hy = np.cos(psi), np.sin(psi)
        mx = c1[0] + 2.0 * sig0 * hy
        my = c1[1] - 2.0 * sig0 * hx
        g = np.hypot(mx - c3[0], my - c3[1]) - 2.0
        for k in np.where(np.signbit(g) != np.signbit(np.roll(g, -1)))[0]:
            lo, hi = ts[k], ts[k] + (ts[1] - ts[0])

            def gval(t):
                ps = th0 + sig0 * t
                h = _heading(ps)
                m = c1 - 2.0 * sig0 * _rot90(h)
                return float(np.linalg.norm(m - c3)) - 2.0

            glo = gval(lo)
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                gm = gval(mid)
                if (gm < 0) == (glo < 0):
                    lo, glo = mid, gm
                else:
                    hi = mid
            t = 0.5 * (lo + hi)
            ps = th0 + sig0 * t
            h = _heading(ps)
            m = c1 - 2.0 * sig0 * _rot90(h)
            t2 = 0.5 * (m + c3)
            r2 = t2 - m
            # heading on the middle circle (turn -sig0) at the tangency point
            ps2 = math.atan2(-sig0 * r2[0], sig0 * r2[1])
            p_arc = _mod2pi(-sig0 * (ps2 - ps))
            q = _mod2pi(sig0 * (th1 - ps2))
            best = min(best, t + p_arc + q)

    return best


# -- Monte-Carlo planar area oracle -------------------------------------------


def mc_region_area(rng, bounds, n_samples, predicate):
    """Area of {x in bounds : predicate(x)} by uniform Monte-Carlo sampling.

    ``predicate`` maps an (m, 2) array of plane points to a boolean mask.
    """
    (x0, x1), (y0, y1) = bounds
    pts = np.stack(
        [rng.uniform(x0, x1, n_samples), rng.uniform(y0, y1, n_samples)], axis=1
    )
    frac = float(np.mean(predicate(pts)))
    return frac * (x1 - x0) * (y1 - y0)


def point_in_polygon(points, polygon):
    """Even-odd rule point-in-polygon test, vectorised over points."""
    x, y = points[:, 0], points[:, 1]
    inside = np.zeros(len(points), dtype=bool)
    px, py = polygon[:, 0], polygon[:, 1]
    n = len(polygon)
    j = n - 1
    for i in range(n):
        cond = ((py[i] > y) != (py[j] > y)) & (
            x < (px[j] - px[i]) * (y - py[i]) / (py[j] - py[i] + 1e-300) + px[i]
        )
        inside ^= cond
        j = i
    return inside


def brute_distance_to_segments(points, seg_starts, seg_ends):
    """Min distance from each query point to a segment soup (plain loops)."""
    out = np.full(len(points), np.inf)
    for a, b in zip(seg_starts, seg_ends):
        ab = b - a
        denom = float(ab @ ab)
        for k, p in enumerate(points):
            t = 0.0 if denom == 0 else max(0.0, min(1.0, float((p - a) @ ab) / denom))
            d = np.linalg.norm(p - (a + t * ab))
            if d < out[k]:
                out[k] = d
    return out
