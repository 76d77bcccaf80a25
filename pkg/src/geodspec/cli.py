"""Command-line entry point.

Subcommands: gen, check, spectrum, compare, residuals, bound, assemble.
Errors are reported as a JSON object on stderr with a nonzero exit code.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import analysis
from .assembly import assemble, write_matrix_market, write_triplets_json
from .complex import check_closed_pseudomanifold
from .eig import SpectralResult, solve
from .errors import GeodSpecError, ValidationError
from .io import dumps, load_mesh, save_mesh
from .manifolds import VertexedMesh, generate_sphere_mesh, generate_torus_mesh
from .metric import mesh_stats, validate_metric

CONSTANT_NOTE = "valid only up to the dimensional constant C_n, which is not known explicitly"


def _emit(obj, out: str | None) -> None:
    text = dumps(obj)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _metric(mesh):
    return mesh.metric_complex if isinstance(mesh, VertexedMesh) else mesh


def _vertexed(path) -> VertexedMesh:
    mesh = load_mesh(path)
    if not isinstance(mesh, VertexedMesh):
        raise GeodSpecError(f"{path} has no positions/manifold tag; analytic comparison impossible")
    return mesh


def _pair(text: str, sep: str, cast=float) -> tuple:
    parts = text.split(sep)
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected two values separated by {sep!r}: {text!r}")
    return tuple(cast(p) for p in parts)


def cmd_gen(args) -> int:
    if args.manifold == "sphere":
        if args.level is None:
            raise GeodSpecError("--level is required for the sphere")
        mesh = generate_sphere_mesh(args.radius, args.level)
    else:
        if args.grid is None:
            raise GeodSpecError("--grid MxK is required for the torus")
        m, k = _pair(args.grid, "x", int)
        periods = _pair(args.periods, ",") if args.periods else (2 * math.pi, 2 * math.pi)
        mesh = generate_torus_mesh(periods, m, k)
    if args.output:
        save_mesh(mesh, args.output)
    else:
        from .io import mesh_to_dict
        _emit(mesh_to_dict(mesh), None)
    return 0


def cmd_check(args) -> int:
    try:
        mesh = load_mesh(args.mesh)
    except ValidationError as exc:
        _emit({"ok": False, "error": str(exc), "report": exc.report}, args.output)
        return 1
    mc = _metric(mesh)
    closed = check_closed_pseudomanifold(mc.complex)
    metric = validate_metric(mc)
    stats = mesh_stats(mc)
    distinct = np.unique(np.round(mc.edge_lengths, 12))
    out = {
        "ok": closed.ok and metric.ok,
        "closedness": closed.to_dict(),
        "metric": metric.to_dict(),
        "stats": stats.to_dict(),
        "counts": list(mc.complex.faces.counts()),
        "euler_characteristic": mc.complex.faces.euler_characteristic(),
        "distinct_edge_lengths": len(distinct),
    }
    _emit(out, args.output)
    return 0 if out["ok"] else 1


def cmd_spectrum(args) -> int:
    mesh = load_mesh(args.mesh)
    fp = assemble(_metric(mesh))
    result = solve(fp, args.num_eigs, args.solver)
    out = result.to_dict(include_eigenvectors=args.eigvecs)
    out["format_version"] = "1"
    out["stats"] = fp.stats.to_dict()
    _emit(out, args.output)
    return 0


def _load_spectrum(path) -> SpectralResult:
    return SpectralResult.from_dict(json.loads(Path(path).read_text()))


def cmd_compare(args) -> int:
    spec = _load_spectrum(args.spectrum)
    mesh = _vertexed(args.mesh)
    manifold = mesh.manifold
    if args.clusters is None:
        q = 1
        while sum(m for _, m in manifold.spectrum(q + 1)) <= len(spec):
            q += 1
    else:
        q = args.clusters
    stats = mesh_stats(mesh.metric_complex)
    report = analysis.compare_spectra(
        spec, manifold.spectrum(q),
        mesh={"mesh": stats.mesh, "thinness": stats.thinness, "N": mesh.num_vertices})
    _emit(report.to_dict(), args.output)
    if args.csv:
        Path(args.csv).write_text("\n".join(report.csv_rows()) + "\n")
    return 0


def cmd_residuals(args) -> int:
    spec = _load_spectrum(args.spectrum)
    if spec.eigenvectors is None:
        raise GeodSpecError("spectrum file has no eigenvectors; rerun `spectrum` with --eigvecs")
    mesh = _vertexed(args.mesh)
    p, q = _pair(args.clusters, "..", int)
    mult = [m for _, m in mesh.manifold.spectrum(q + 1)]
    start, stop = sum(mult[:p]), sum(mult[:q + 1])
    Y, ids = analysis.restrict_clusters(mesh.manifold, mesh, range(p, q + 1))
    fp = assemble(mesh.metric_complex)
    report = analysis.projection_residual(fp, spec, Y, (start, stop), ids)
    out = report.to_dict()
    out["mesh"] = float(fp.stats.mesh)
    _emit(out, args.output)
    return 0


def cmd_bound(args) -> int:
    if args.which == "thm1":
        value = analysis.theorem1_admissible_mesh(
            args.n, args.eps, args.Lambda, args.diam, args.inj, args.thinness, args.order, args.cn)
        out = {"bound": "admissible_mesh", "value": value}
    else:
        value = analysis.cheng_bound(args.n, args.k, args.Lambda, args.diam, args.inj, args.cn)
        out = {"bound": "eigenvalue_upper_bound", "value": value}
    out.update({"C_n": args.cn, "note": CONSTANT_NOTE})
    _emit(out, None)
    return 0


def cmd_assemble(args) -> int:
    fp = assemble(_metric(load_mesh(args.mesh)))
    prefix = args.output
    if args.format == "mm":
        write_matrix_market(fp.mass, f"{prefix}_mass.mtx")
        write_matrix_market(fp.stiffness, f"{prefix}_stiffness.mtx")
    else:
        write_triplets_json(fp.mass, f"{prefix}_mass.json")
        write_triplets_json(fp.stiffness, f"{prefix}_stiffness.json")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="geodspec",
                                     description="Discrete Laplace spectra from edge lengths.")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a model mesh")
    g.add_argument("--manifold", choices=["sphere", "torus"], required=True)
    g.add_argument("--level", type=int)
    g.add_argument("--radius", type=float, default=1.0)
    g.add_argument("--grid")
    g.add_argument("--periods")
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("check", help="validate a mesh and print its statistics")
    c.add_argument("mesh")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_check)

    s = sub.add_parser("spectrum", help="solve the generalized eigenproblem")
    s.add_argument("mesh")
    s.add_argument("--num-eigs", type=int, required=True)
    s.add_argument("--solver", choices=["auto", "dense", "iterative"], default="auto")
    s.add_argument("--eigvecs", action="store_true")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_spectrum)

    cp = sub.add_parser("compare", help="compare with the analytic spectrum")
    cp.add_argument("spectrum")
    cp.add_argument("--mesh", required=True)
    cp.add_argument("--clusters", type=int)
    cp.add_argument("-o", "--output")
    cp.add_argument("--csv")
    cp.set_defaults(func=cmd_compare)

    r = sub.add_parser("residuals", help="eigenfunction projection residuals")
    r.add_argument("spectrum")
    r.add_argument("--mesh", required=True)
    r.add_argument("--clusters", required=True, help="analytic cluster range p..q")
    r.add_argument("-o", "--output")
    r.set_defaults(func=cmd_residuals)

    b = sub.add_parser("bound", help="evaluate an a priori bound")
    b.add_argument("which", choices=["thm1", "cheng"])
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--eps", type=float)
    b.add_argument("--lambda", dest="Lambda", type=float, required=True)
    b.add_argument("--diam", type=float, required=True)
    b.add_argument("--inj", type=float, required=True)
    b.add_argument("--thinness", type=float)
    b.add_argument("--order", type=int)
    b.add_argument("--k", type=int)
    b.add_argument("--cn", type=float, default=1.0)
    b.set_defaults(func=cmd_bound)

    a = sub.add_parser("assemble", help="export mass and stiffness matrices")
    a.add_argument("mesh")
    a.add_argument("--format", choices=["json", "mm"], default="json")
    a.add_argument("-o", "--output", required=True, help="output path prefix")
    a.set_defaults(func=cmd_assemble)
    return parser


def _check_bound_args(args):
    need = ["eps", "thinness", "order"] if args.which == "thm1" else ["k"]
    missing = [f"--{n}" for n in need if getattr(args, n) is None]
    if missing:
        raise GeodSpecError(f"bound {args.which} requires {', '.join(missing)}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "bound":
            _check_bound_args(args)
        return args.func(args)
    except (GeodSpecError, OSError, ValueError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        report = getattr(exc, "report", None)
        if report is not None:
            err["report"] = report
        for attr in ("line", "offset"):
            if getattr(exc, attr, None) is not None:
                err[attr] = getattr(exc, attr)
        sys.stderr.write(json.dumps(err, sort_keys=True) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
