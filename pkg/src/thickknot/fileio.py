"""File formats: .curve records, .jsonl traces, OBJ tube meshes.

Formats are versioned structured text (JSON) so that golden files diff
cleanly; writes go through a temp file and an atomic rename.  Multi-strand
open records use a null entry in the points list as the strand break
marker.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

import numpy as np

from .curve import DiscreteCurve, GeometricReport, length, tangents
from .errors import EmptyTrace, NoTube, ThickknotError
from .frames import rotation_minimizing_normals
from .thickness import geometric_report

__all__ = [
    "IsotopyTrace",
    "read_curve",
    "write_curve",
    "read_trace",
    "write_trace",
    "export_mesh",
    "report_to_dict",
    "report_from_dict",
]

FORMAT_VERSION = 1


@dataclass(frozen=True)
class IsotopyTrace:
    """Time-ordered curves with their measured reports.

    A finite witness of a candidate constraint-preserving deformation: all
    frames share the closed flag and tube radius.
    """

    frames: tuple
    reports: tuple
    metadata: dict

    def __post_init__(self):
        if not self.frames:
            raise EmptyTrace("trace has no frames")
        if len(self.frames) != len(self.reports):
            raise ValueError("one report per frame required")
        first = self.frames[0]
        for f in self.frames:
            if f.closed != first.closed or f.tube_radius != first.tube_radius:
                raise ValueError("frames must share closed flag and tube radius")


def _atomic_write(path, text: str):
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _curve_to_dict(curve: DiscreteCurve) -> dict:
    points = []
    slices = curve.component_slices()
    for k, (lo, hi) in enumerate(slices):
        if k:
            points.append(None)  # strand break marker
        points.extend([float(x), float(y), float(z)] for x, y, z in curve.points[lo:hi])
    return {
        "format_version": FORMAT_VERSION,
        "closed": curve.closed,
        "tube_radius": float(curve.tube_radius),
        "points": points,
    }


def _curve_from_dict(data: dict) -> DiscreteCurve:
    if data.get("format_version") != FORMAT_VERSION:
        raise ThickknotError(f"unsupported curve format_version {data.get('format_version')}")
    pts = []
    breaks = []
    for entry in data["points"]:
        if entry is None:
            breaks.append(len(pts))
        else:
            pts.append(entry)
    return DiscreteCurve(
        np.asarray(pts, dtype=float),
        closed=bool(data["closed"]),
        tube_radius=float(data["tube_radius"]),
        breaks=tuple(breaks),
    )


def write_curve(curve: DiscreteCurve, path) -> None:
    _atomic_write(path, json.dumps(_curve_to_dict(curve), sort_keys=True) + "\n")


def read_curve(path) -> DiscreteCurve:
    with open(path, encoding="utf-8") as fh:
        return _curve_from_dict(json.load(fh))


def report_to_dict(report: GeometricReport) -> dict:
    return {
        "length": report.length,
        "max_curvature": report.max_curvature,
        "r2": "inf" if math.isinf(report.r2) else report.r2,
        "thickness": report.thickness,
        "diameter": report.diameter,
    }


def report_from_dict(data: dict) -> GeometricReport:
    r2 = math.inf if data["r2"] == "inf" else float(data["r2"])
    return GeometricReport(
        length=float(data["length"]),
        max_curvature=float(data["max_curvature"]),
        r2=r2,
        thickness=float(data["thickness"]),
        diameter=float(data["diameter"]),
    )


def write_trace(trace: IsotopyTrace, path) -> None:
    lines = [
        json.dumps(
            {"format_version": FORMAT_VERSION, "kind": "trace", "metadata": trace.metadata},
            sort_keys=True,
            default=str,
        )
    ]
    for curve, report in zip(trace.frames, trace.reports):
        lines.append(
            json.dumps(
                {"curve": _curve_to_dict(curve), "report": report_to_dict(report)},
                sort_keys=True,
            )
        )
    _atomic_write(path, "\n".join(lines) + "\n")


def read_trace(path, spot_check: bool = True) -> IsotopyTrace:
    """Load a trace; every tenth frame's report is re-measured and compared."""
    with open(path, encoding="utf-8") as fh:
        lines = [line for line in fh.read().splitlines() if line.strip()]
    if not lines:
        raise EmptyTrace(f"{path} is empty")
    header = json.loads(lines[0])
    if header.get("format_version") != FORMAT_VERSION or header.get("kind") != "trace":
        raise ThickknotError(f"{path} is not a trace file")
    frames, reports = [], []
    for line in lines[1:]:
        record = json.loads(line)
        frames.append(_curve_from_dict(record["curve"]))
        reports.append(report_from_dict(record["report"]))
    if not frames:
        raise EmptyTrace(f"{path} has a header but no frames")
    if spot_check:
        for k in range(0, len(frames), 10):
            fresh = geometric_report(frames[k])
            stored = reports[k]
            if not (
                math.isclose(fresh.length, stored.length, rel_tol=1e-9)
                and math.isclose(fresh.max_curvature, stored.max_curvature, rel_tol=1e-9, abs_tol=1e-12)
            ):
                raise ThickknotError(f"frame {k} report does not match its curve")
    return IsotopyTrace(frames=tuple(frames), reports=tuple(reports), metadata=header["metadata"])


# -- tube meshes --------------------------------------------------------------


def _rotate_about(v, axis, angle):
    axis = axis / np.linalg.norm(axis)
    return (
        v * math.cos(angle)
        + np.cross(axis, v) * math.sin(angle)
        + axis * np.dot(axis, v) * (1.0 - math.cos(angle))
    )


def tube_mesh(curve: DiscreteCurve, circumferential_segments: int = 16):
    """Sweep a circle along the curve: returns (vertices, triangles).

    Closed curves yield a watertight torus-topology mesh (the rotation
    minimizing frame's holonomy is spread evenly so the seam matches);
    open curves get fan caps at both ends.
    """
    if curve.tube_radius <= 0.0:
        raise NoTube("mesh export needs a positive tube radius")
    if curve.breaks:
        raise ThickknotError("mesh export handles single-strand curves")
    m = int(circumferential_segments)
    pts = curve.points
    tan = tangents(curve)
    n = curve.n
    if curve.closed:
        ext_pts = np.vstack([pts, pts[:1]])
        ext_tan = np.vstack([tan, tan[:1]])
        normals = rotation_minimizing_normals(ext_pts, ext_tan)
        # spread the holonomy so ring n would coincide with ring 0
        closing = normals[-1]
        ref = normals[0]
        binorm = np.cross(ext_tan[0], ref)
        defect = math.atan2(float(np.dot(closing, binorm)), float(np.dot(closing, ref)))
        normals = normals[:-1]
        for k in range(n):
            normals[k] = _rotate_about(normals[k], tan[k], -defect * k / n)
    else:
        normals = rotation_minimizing_normals(pts, tan)

    r = curve.tube_radius
    theta = 2.0 * math.pi * np.arange(m) / m
    verts = np.empty((n * m, 3))
    for k in range(n):
        b = np.cross(tan[k], normals[k])
        ring = pts[k] + r * (
            np.outer(np.cos(theta), normals[k]) + np.outer(np.sin(theta), b)
        )
        verts[k * m : (k + 1) * m] = ring

    faces = []
    last = n if curve.closed else n - 1
    for k in range(last):
        k2 = (k + 1) % n
        for i in range(m):
            i2 = (i + 1) % m
            a, b_, c, d = k * m + i, k * m + i2, k2 * m + i2, k2 * m + i
            faces.append((a, b_, c))
            faces.append((a, c, d))
    if not curve.closed:
        start_center = len(verts)
        verts = np.vstack([verts, pts[:1], pts[-1:]])
        end_center = start_center + 1
        for i in range(m):
            i2 = (i + 1) % m
            faces.append((start_center, i2, i))
            faces.append((end_center, (n - 1) * m + i, (n - 1) * m + i2))
    return verts, np.asarray(faces, dtype=int)


def export_mesh(curve: DiscreteCurve, circumferential_segments: int, path) -> tuple:
    """Write the swept tube as an ASCII OBJ file; returns (vertices, faces)."""
    verts, faces = tube_mesh(curve, circumferential_segments)
    lines = [f"v {x!r} {y!r} {z!r}" for x, y, z in verts]
    lines += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in faces]
    _atomic_write(path, "\n".join(lines) + "\n")
    return verts, faces
