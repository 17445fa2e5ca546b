"""Command-line entry point.

Subcommands: construct, tighten, cap, thickness, diagnose, probe, classify,
export-mesh.  All randomness is seeded (--seed, default 0) and outputs are
byte-reproducible.  Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import constructions, diagnostics, fileio, sono, thickness
from .curve import DiscreteCurve, length
from .errors import ThickknotError


def _print_record(record: dict) -> None:
    print(json.dumps(record, sort_keys=True))


def _report_record(report) -> dict:
    return fileio.report_to_dict(report)


def _cmd_construct(args) -> int:
    if args.shape == "circle":
        curve = constructions.round_circle(args.radius, args.n, tube_radius=args.tube_radius)
    elif args.shape == "overhand":
        curve = constructions.open_overhand(wall_gap=args.wall_gap, n=args.n)
    elif args.shape == "k0":
        curve = constructions.build_locked_unknot(wall_gap=args.wall_gap, seed=args.seed)
    elif args.shape == "kn":
        curve = constructions.build_stacked_unknot(args.count, wall_gap=args.wall_gap, seed=args.seed)
    else:  # pragma: no cover - argparse restricts choices
        raise ThickknotError(f"unknown shape {args.shape}")
    fileio.write_curve(curve, args.out)
    _print_record(
        {
            "written": args.out,
            "points": curve.n,
            "closed": curve.closed,
            "length": length(curve),
        }
    )
    return 0


def _cmd_thickness(args) -> int:
    curve = fileio.read_curve(args.curve)
    report = thickness.geometric_report(curve)
    record = {"report": _report_record(report)}
    if args.tau is not None:
        verdict = thickness.check_membership(
            curve, args.tau, unknot_checker=constructions.unconstrained_unknot_check
        )
        record["membership"] = {
            "tau": verdict.tau,
            "is_member": verdict.is_member,
            "reasons": list(verdict.reasons),
            "unknottedness": verdict.unknottedness,
        }
    if args.report:
        fileio._atomic_write(args.report, json.dumps(record, sort_keys=True) + "\n")
    _print_record(record)
    return 0


def _cmd_tighten(args) -> int:
    curve = fileio.read_curve(args.curve)
    config = sono.TightenConfig(
        target_thickness=args.tau,
        wall_gap=args.wall_gap if args.open else None,
        max_iters=args.max_iters,
        seed=args.seed,
        trace_every=args.trace_every if args.trace else 0,
    )
    result = sono.tighten(curve, config)
    fileio.write_curve(result.final_curve, args.out)
    if args.trace and result.trace is not None:
        fileio.write_trace(result.trace, args.trace)
    _print_record(
        {
            "written": args.out,
            "iterations": result.iterations,
            "converged": result.converged,
            "report": _report_record(result.report),
        }
    )
    return 0


def _cmd_cap(args) -> int:
    core = fileio.read_curve(args.core)
    from .dubins import close_open_curve, derive_cap_configurations, solve_dubins

    pairs = derive_cap_configurations(core)
    closed = close_open_curve(core, pairs)
    fileio.write_curve(closed, args.out)
    diagnostics_record = {"written": args.out, "caps": []}
    for label, (start, end) in zip(("far", "near"), pairs):
        path = solve_dubins(start, end)
        t0, t1 = path.end_tangents()
        diagnostics_record["caps"].append(
            {
                "junction": label,
                "word": path.word,
                "family": path.family,
                "length": path.total_length,
                "start_tangent_mismatch": float(np.linalg.norm(t0 - start.tangent)),
                "end_tangent_mismatch": float(np.linalg.norm(t1 - end.tangent)),
                "end_separation": float(np.linalg.norm(start.position - end.position)),
                "strand_pairing": "end i of one strand to end i of the other, per wall",
            }
        )
    _print_record(diagnostics_record)
    return 0


def _cmd_diagnose(args) -> int:
    curve = fileio.read_curve(args.curve)
    lo, hi = (int(x) for x in args.long_arc.split(":"))
    px, py, pz, nx, ny, nz = (float(x) for x in args.plane.split(","))
    if args.trace:
        trace = fileio.read_trace(args.trace)
        report = diagnostics.trace_diagnostics(trace, (lo, hi), (px, py, pz), (nx, ny, nz))
        _print_record(
            {
                "min_disk_diameter": report.min_disk_diameter,
                "min_near_contact_area": report.min_near_contact_area,
                "min_cone_angle": report.min_cone_angle,
                "frames": report.frames,
                "lost_frames": list(report.lost_frames),
            }
        )
        return 0
    triple = diagnostics.extract_aperture(curve, (lo, hi), (px, py, pz), (nx, ny, nz))
    _print_record(
        {
            "cone_angle": triple.cone_angle,
            "disk_diameter": triple.disk_diameter,
            "near_contact_area": triple.near_contact_area,
            "tip": [float(x) for x in triple.tip],
            "contour_points": len(triple.contour),
            "notes": list(triple.notes),
        }
    )
    return 0


def _cmd_probe(args) -> int:
    if args.which == "ball":
        report = diagnostics.probe_ball_lemma(attempts=args.attempts, seed=args.seed)
    else:
        report = diagnostics.probe_cylinder_lemma(attempts=args.attempts, seed=args.seed)
    _print_record(
        {
            "probe": args.which,
            "best_max_curvature": report.best_max_curvature,
            "attempts": report.attempts,
            "valid_candidates": report.valid_candidates,
            "seed": report.seed,
        }
    )
    return 0


def _cmd_classify(args) -> int:
    curve = fileio.read_curve(args.curve)
    labels = constructions.classify_segments(curve)
    _print_record(
        {
            "segments": [
                {"range": list(lab.range), "kind": lab.kind, "fit_residual": lab.fit_residual}
                for lab in labels
            ],
            "count": len(labels),
        }
    )
    return 0


def _cmd_export_mesh(args) -> int:
    curve = fileio.read_curve(args.curve)
    verts, faces = fileio.export_mesh(curve, args.segments, args.out)
    _print_record({"written": args.out, "vertices": len(verts), "triangles": len(faces)})
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="thickknot")
    parser.add_argument("--seed", type=int, default=0, help="seed for all randomness")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a reference curve")
    p.add_argument("shape", choices=["circle", "overhand", "k0", "kn"])
    p.add_argument("--out", required=True)
    p.add_argument("--n", type=int, default=512)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--tube-radius", type=float, default=1.0)
    p.add_argument("--wall-gap", type=float, default=12.0)
    p.add_argument("--count", type=int, default=1, help="copies for the kn stack")
    p.set_defaults(func=_cmd_construct)

    p = sub.add_parser("thickness", help="measure a curve and optionally test membership")
    p.add_argument("curve")
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--report", default=None)
    p.set_defaults(func=_cmd_thickness)

    p = sub.add_parser("tighten", help="tighten a curve at fixed tube thickness")
    p.add_argument("curve")
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--open", action="store_true")
    p.add_argument("--wall-gap", type=float, default=12.0)
    p.add_argument("--max-iters", type=int, default=2000)
    p.add_argument("--trace", default=None)
    p.add_argument("--trace-every", type=int, default=10)
    p.set_defaults(func=_cmd_tighten)

    p = sub.add_parser("cap", help="close a two-strand open core with planar caps")
    p.add_argument("core")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_cap)

    p = sub.add_parser("diagnose", help="aperture diagnostics on a curve or trace")
    p.add_argument("curve")
    p.add_argument("--long-arc", required=True, metavar="A:B")
    p.add_argument("--plane", required=True, metavar="px,py,pz,nx,ny,nz")
    p.add_argument("--trace", default=None)
    p.set_defaults(func=_cmd_diagnose)

    p = sub.add_parser("probe", help="optimization probes of the curvature lemmas")
    p.add_argument("which", choices=["ball", "cylinder"])
    p.add_argument("--attempts", type=int, default=100)
    p.set_defaults(func=_cmd_probe)

    p = sub.add_parser("classify", help="elementary segment decomposition")
    p.add_argument("curve")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("export-mesh", help="write the swept tube as an OBJ mesh")
    p.add_argument("curve")
    p.add_argument("--out", required=True)
    p.add_argument("--segments", type=int, default=16)
    p.set_defaults(func=_cmd_export_mesh)
    return parser


def run_cli(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except ThickknotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))
