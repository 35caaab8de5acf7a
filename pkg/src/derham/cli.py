"""Command-line front end for verification campaigns.

Exit codes: 0 when every claim is verified (including the documented deficit
of the naive quad diagram, which counts as verified when reproduced exactly),
1 when a claim fails or assembly breaks, 2 for invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

from .complexcheck import (
    DIAGRAMS,
    NAIVE_DIAGRAM,
    appendix_report,
    audit_report,
    dof_comparison,
    naive_quad_report,
    verify_diagram,
)
from .exactla import ExactSolveError, ExactWidthExceeded
from .fespace import SpanError
from .hodge import hodge_report
from .mesh import MeshKind, build_mesh, entity_counts
from .operators import MembershipError
from .refcheck import refcheck_report
from .report import Report

__all__ = ["main", "build_parser"]

_KINDS = {"tri": MeshKind.TRIANGULAR, "quad": MeshKind.CARTESIAN}


def k_range(text: str) -> list[int]:
    """Parse a level argument: '2' or a range '0..2'."""
    try:
        if ".." in text:
            lo, hi = (int(part) for part in text.split("..", 1))
            if hi < lo:
                raise ValueError
            return list(range(lo, hi + 1))
        return [int(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected K or LO..HI, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text",
                        help="report rendering (default text)")
    common.add_argument("--output", metavar="PATH", default=None,
                        help="also write the rendered report to PATH")

    ap = argparse.ArgumentParser(
        prog="derham",
        description="Construct discrete complexes on periodic meshes and "
                    "machine-check their rank, kernel and decomposition claims "
                    "in exact rational arithmetic.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mesh-info", parents=[common],
                       help="entity counts and Euler characteristic")
    p.add_argument("--kind", choices=sorted(_KINDS), required=True)
    p.add_argument("--nx", type=int, required=True)
    p.add_argument("--ny", type=int, required=True)

    p = sub.add_parser("verify", parents=[common],
                       help="verify the structural claims of a diagram on a mesh")
    p.add_argument("--diagram", choices=sorted(DIAGRAMS) + [NAIVE_DIAGRAM])
    p.add_argument("--all", action="store_true",
                   help="run the whole verification matrix (ignores --diagram/--nx/--ny/--k)")
    p.add_argument("--nx", type=int, default=2)
    p.add_argument("--ny", type=int, default=2)
    p.add_argument("--k", type=k_range, default=[0], metavar="K|LO..HI")
    p.add_argument("--float-check", action="store_true",
                   help="cross-check exact ranks against float SVD ranks")
    p.add_argument("--jobs", type=int, default=1,
                   help="worker processes for campaigns (default 1)")

    p = sub.add_parser("refcheck", parents=[common],
                       help="reference-cell boundary map, bubbles and decomposition")
    p.add_argument("--cell", choices=("tri", "quad"), required=True)
    p.add_argument("--k", type=k_range, default=[0], metavar="K|LO..HI")
    p.add_argument("--samples", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("appendix", parents=[common],
                       help="jump-constraint nullity of the per-cell three-field family")
    p.add_argument("--nx", type=int, required=True)
    p.add_argument("--ny", type=int, required=True)

    p = sub.add_parser("hodge", parents=[common],
                       help="orthogonal three-way splitting of seeded random fields")
    p.add_argument("--diagram", choices=sorted(DIAGRAMS), required=True)
    p.add_argument("--nx", type=int, default=2)
    p.add_argument("--ny", type=int, default=2)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--fields", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--backend", choices=("exact", "float"), default="exact")
    p.add_argument("--tol", type=float, default=1e-10,
                   help="relative tolerance for the float backend (default 1e-10)")

    p = sub.add_parser("audit", parents=[common],
                       help="space dimensions against closed forms, plus dof comparison")
    p.add_argument("--kind", choices=sorted(_KINDS), required=True)
    p.add_argument("--nx", type=int, default=2)
    p.add_argument("--ny", type=int, default=2)
    p.add_argument("--k-max", type=int, default=3)
    return ap


def _run_job(job: tuple) -> Report:
    """Verification worker; top level so process pools can pickle it."""
    if job[0] == "naive":
        _, nx, ny, fc = job
        return naive_quad_report(nx, ny, float_check=fc)
    _, name, nx, ny, k, fc = job
    return verify_diagram(name, nx, ny, k, float_check=fc)


def _verify_jobs(args) -> list[tuple]:
    if args.all:
        jobs: list[tuple] = []
        for name in ("tri-dp", "tri-dp-curl", "quad-enriched", "quad-enriched-curl"):
            for nx, ny in ((2, 2), (3, 2)):
                for k in range(3):
                    jobs.append(("diagram", name, nx, ny, k, True))
        for name in ("tri-drt", "tri-dn", "quad-drt", "quad-dn"):
            for k in range(2):
                jobs.append(("diagram", name, 2, 2, k, True))
        for nx, ny in ((2, 2), (3, 4), (4, 3)):
            jobs.append(("naive", nx, ny, True))
        return jobs
    if not args.diagram:
        raise ValueError("verify needs --diagram or --all")
    if args.diagram == NAIVE_DIAGRAM:
        return [("naive", args.nx, args.ny, args.float_check)]
    return [("diagram", args.diagram, args.nx, args.ny, k, args.float_check)
            for k in args.k]


def _run_reports(jobs: list[tuple], n_jobs: int) -> list[Report]:
    if n_jobs <= 1 or len(jobs) <= 1:
        return [_run_job(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(_run_job, jobs))  # map keeps submission order


def _emit(reports: list[Report], fmt: str, output: str | None = None) -> int:
    ok = all(r.passed for r in reports)
    if fmt == "json":
        doc = {"schema": 1, "passed": ok, "reports": [r.to_dict() for r in reports]}
        text = json.dumps(doc, indent=2)
    else:
        lines = [r.format_text() for r in reports]
        if len(reports) > 1:
            n = sum(1 for r in reports if r.passed)
            lines.append(f"== summary: {n}/{len(reports)} reports passed")
        text = "\n".join(lines)
    print(text)
    if output is not None:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return 0 if ok else 1


def _dispatch(args) -> int:
    if args.command == "mesh-info":
        mesh = build_mesh(_KINDS[args.kind], args.nx, args.ny)
        info = mesh.summary()
        expected = entity_counts(mesh.kind, args.nx, args.ny)
        counts = (info["cells"], info["faces"], info["points"])
        ok = counts == expected and info["euler_characteristic"] == 0
        if args.format == "json":
            info["counts_match_formulas"] = ok
            text = json.dumps(info, indent=2)
        else:
            line = (f"kind={args.kind} nx={args.nx} ny={args.ny}: "
                    f"cells={info['cells']} faces={info['faces']} "
                    f"points={info['points']} euler={info['euler_characteristic']}")
            text = line if ok else line + "  [MISMATCH]"
        print(text)
        if args.output is not None:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        return 0 if ok else 1
    if args.command == "verify":
        return _emit(_run_reports(_verify_jobs(args), args.jobs),
                     args.format, args.output)
    if args.command == "refcheck":
        cell = {"tri": "triangle", "quad": "square"}[args.cell]
        reports = [refcheck_report(cell, k, samples=args.samples, seed=args.seed)
                   for k in args.k]
        return _emit(reports, args.format, args.output)
    if args.command == "appendix":
        return _emit([appendix_report(args.nx, args.ny)], args.format, args.output)
    if args.command == "hodge":
        rep = hodge_report(args.diagram, args.nx, args.ny, args.k,
                           fields=args.fields, seed=args.seed,
                           backend=args.backend, tol=args.tol)
        return _emit([rep], args.format, args.output)
    if args.command == "audit":
        reports = [audit_report(_KINDS[args.kind], args.nx, args.ny, args.k_max),
                   dof_comparison(args.k_max)]
        return _emit(reports, args.format, args.output)
    raise ValueError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except (MembershipError, SpanError, ExactSolveError, AssertionError) as exc:
        print(f"error: verification failed: {exc}", file=sys.stderr)
        return 1
    except ExactWidthExceeded as exc:
        print(f"error: {exc}; raise DERHAM_MAX_EXACT_COLS or use the float backend",
              file=sys.stderr)
        return 2
    except (ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
