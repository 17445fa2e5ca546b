"""Rotation-minimizing frames along polylines (double-reflection transport).

The frame carries a unit normal along the curve without introducing any
rotation about the tangent, which keeps offset strands from spuriously
wrapping around the base curve.
"""

from __future__ import annotations

import numpy as np

__all__ = ["rotation_minimizing_normals", "any_unit_normal"]


def any_unit_normal(tangent: np.ndarray) -> np.ndarray:
    """Deterministic unit vector orthogonal to ``tangent``."""
    t = np.asarray(tangent, dtype=float)
    axis = np.zeros(3)
    axis[np.argmin(np.abs(t))] = 1.0
    n = np.cross(t, axis)
    return n / np.linalg.norm(n)


def rotation_minimizing_normals(
    points: np.ndarray,
    tangents: np.ndarray,
    initial_normal: np.ndarray | None = None,
) -> np.ndarray:
    """Transport a normal along the polyline with zero tangential twist.

    Uses the double-reflection method, which is fourth-order accurate and
    exactly preserves orthogonality and unit length.
    """
    pts = np.asarray(points, dtype=float)
    tan = np.asarray(tangents, dtype=float)
    n = len(pts)
    normals = np.empty_like(pts)
    r = any_unit_normal(tan[0]) if initial_normal is None else np.asarray(initial_normal, float)
    r = r - np.dot(r, tan[0]) * tan[0]
    r /= np.linalg.norm(r)
    normals[0] = r
    for i in range(n - 1):
        v1 = pts[i + 1] - pts[i]
        c1 = np.dot(v1, v1)
        if c1 == 0.0:
            normals[i + 1] = normals[i]
            continue
        r_l = normals[i] - (2.0 / c1) * np.dot(v1, normals[i]) * v1
        t_l = tan[i] - (2.0 / c1) * np.dot(v1, tan[i]) * v1
        v2 = tan[i + 1] - t_l
        c2 = np.dot(v2, v2)
        if c2 == 0.0:
            r_next = r_l
        else:
            r_next = r_l - (2.0 / c2) * np.dot(v2, r_l) * v2
        # re-orthogonalise against accumulated floating drift
        r_next = r_next - np.dot(r_next, tan[i + 1]) * tan[i + 1]
        normals[i + 1] = r_next / np.linalg.norm(r_next)
    return normals
