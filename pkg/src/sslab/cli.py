"""Command-line front end.

Subcommands: ``catalog list``, ``analyze``, ``mesh``, ``locus``, ``scan-4pi``
and ``verify``.  Reports print to stdout in a human layout by default and as
flat ``key=value`` lines with ``--machine``; repeated invocations with the
same arguments produce byte-identical output.  Figure rendering is opt-in
(``--figdir`` / ``--png``) and writes PNG files next to nothing else.

Exit codes: 0 success, 1 usage or runtime error, 2 graded mismatch
(``analyze`` against the expected record, ``verify`` criteria), 3 a
``scan-4pi`` sweep that unexpectedly found no collision points.
"""

from __future__ import annotations

import argparse
import inspect
import os
import sys

from . import catalog
from .config import Settings, load_settings
from .errors import SslabError
from .locus import Window, fourpi_scan, scan
from .mesh import export_mesh, isometry_defect, sample_mesh
from .report import analyze, cstr, fstr

_PROJECTIONS = ("drop-x1", "drop-x2", "drop-x3", "drop-x4", "slice-x3=0", "slice-x4=")


def _parse_window(spec: str) -> Window:
    """shape:numbers -- rect:x0,x1,y0,y1  disc:R  annulus:r_in,r_out"""
    shape, _, rest = spec.partition(":")
    try:
        nums = [float(v) for v in rest.split(",")] if rest else []
        if shape == "rect" and len(nums) == 4:
            return Window.rect(*nums)
        if shape == "disc" and len(nums) == 1:
            return Window.disc(nums[0])
        if shape == "annulus" and len(nums) == 2:
            return Window.annulus(*nums)
    except ValueError as ex:
        raise SslabError(f"bad window {spec!r}: {ex}") from ex
    raise SslabError(
        f"bad window {spec!r}; use rect:x0,x1,y0,y1 or disc:R or annulus:r_in,r_out"
    )


def _parse_params(pairs) -> dict:
    out = {}
    for raw in pairs or ():
        key, eq, value = raw.partition("=")
        if not eq or not key:
            raise SslabError(f"--param wants key=value, got {raw!r}")
        out[key.strip()] = value.strip()
    return out


def _entry(args):
    return catalog.build(args.name, **_parse_params(args.param))


def _finding_lines(finding) -> list[str]:
    out = [
        f"locus.kind={finding.kind}",
        f"locus.grid_n={finding.grid_n}",
        f"locus.point_count={len(finding.points)}",
        f"locus.curve_count={len(finding.curves)}",
    ]
    for k, p in enumerate(finding.points):
        out.append(f"locus.point.{k}.z={cstr(p.z)}")
        out.append(f"locus.point.{k}.index={p.index if p.index is not None else 'none'}")
        out.append(f"locus.point.{k}.degenerate={str(p.degenerate).lower()}")
    for k, chain in enumerate(finding.curves):
        out.append(f"locus.curve.{k}.samples={len(chain)}")
        out.append(f"locus.curve.{k}.first={cstr(chain[0])}")
        out.append(f"locus.curve.{k}.last={cstr(chain[-1])}")
    return out


def _finding_text(finding) -> list[str]:
    out = [str(finding)]
    for p in finding.points:
        tag = f"  point {cstr(p.z)}"
        if p.index is not None:
            tag += f"  index {p.index:+d}"
        if p.degenerate:
            tag += "  (degenerate)"
        if p.note:
            tag += f"  [{p.note}]"
        out.append(tag)
    for k, chain in enumerate(finding.curves):
        out.append(f"  curve {k}: {len(chain)} samples, {cstr(chain[0])} .. {cstr(chain[-1])}")
    return out


# ---------------------------------------------------------------------------
# subcommands


def cmd_catalog(args, settings: Settings) -> int:
    if args.action != "list":
        raise SslabError(f"unknown catalog action {args.action!r}")
    rows = []
    for name, (func, spec) in catalog.REGISTRY.items():
        sig = inspect.signature(func)
        params = []
        for pname, kind in spec.items():
            default = sig.parameters[pname].default
            params.append(f"{pname}={cstr(default) if default is not inspect.Parameter.empty else '?'}")
        entry = func()
        k = entry.expected.k_total
        note = entry.expected.notes[0] if entry.expected.notes else ""
        rows.append((name, " ".join(params) or "-", "none" if k is None else fstr(k), note))
    wide = max(len(r[0]) for r in rows)
    pwide = max(len(r[1]) for r in rows)
    for name, params, k, note in rows:
        print(f"{name:<{wide}}  {params:<{pwide}}  K_total={k:<16} {note}")
    return 0


def cmd_analyze(args, settings: Settings) -> int:
    entry = _entry(args)
    rep = analyze(entry, settings, skip_area=args.skip_area)
    if args.machine:
        for ln in rep.machine_lines():
            print(ln)
    else:
        print(rep.text())
    if args.figdir:
        from . import figures

        os.makedirs(args.figdir, exist_ok=True)
        art = rep.artifacts
        if art.finding is not None:
            p = figures.locus_figure(
                art.finding, os.path.join(args.figdir, f"{entry.name}-locus.png"),
                title=rep.label)
            print(f"wrote {p}")
        if art.probes:
            p = figures.ray_figure(
                art.probes, os.path.join(args.figdir, f"{entry.name}-rays.png"),
                title=rep.label)
            print(f"wrote {p}")
    return 0 if rep.passed else 2


def cmd_mesh(args, settings: Settings) -> int:
    entry = _entry(args)
    window = _parse_window(args.window) if args.window else None
    mesh = sample_mesh(entry, window=window, resolution=args.res,
                       sheets=args.sheets, settings=settings)
    print(f"mesh {entry.name}: {mesh.n_vertices} vertices, {len(mesh.faces)} faces, "
          f"chart {mesh.chart.kind}, seam {'closed' if mesh.seam_closed else 'open'}")
    for k, off in enumerate(mesh.cut_offsets):
        print(f"  cut {k} offset " + ",".join(fstr(v) for v in off))
    print(f"  isometry defect {isometry_defect(mesh):.3g}")
    export_mesh(mesh, args.proj, args.out)
    print(f"wrote {args.out}")
    if args.png:
        from . import figures

        proj = args.proj if args.proj.startswith("drop-") else "drop-x4"
        figures.wireframe_figure(mesh, args.png, projection=proj, title=entry.name)
        print(f"wrote {args.png}")
    return 0


def cmd_locus(args, settings: Settings) -> int:
    entry = _entry(args)
    window = _parse_window(args.window) if args.window else None
    finding = scan(entry.data, window, grid_n=args.grid, settings=settings)
    lines = _finding_lines(finding) if args.machine else _finding_text(finding)
    for ln in lines:
        print(ln)
    if args.png:
        from . import figures

        figures.locus_figure(finding, args.png, title=entry.data.label or entry.name)
        print(f"wrote {args.png}")
    return 0


def cmd_scan_4pi(args, settings: Settings) -> int:
    a = complex(*[float(v) for v in args.a.split(",")]) if "," in args.a else complex(float(args.a))
    finding = fourpi_scan(args.m, a, grid_n=args.grid, settings=settings)
    lines = _finding_lines(finding) if args.machine else _finding_text(finding)
    for ln in lines:
        print(ln)
    # the family is expected to be singular everywhere; an empty sweep means
    # the grid missed the locus and deserves a distinct exit code
    return 0 if not finding.is_empty else 3


def cmd_verify(args, settings: Settings) -> int:
    from .verify import run_suite

    suite = run_suite(settings, only=args.only)
    if args.machine:
        for ln in suite.machine_lines():
            print(ln)
    else:
        for ln in suite.lines():
            print(ln)
    return 0 if suite.passed else 2


# ---------------------------------------------------------------------------
# parser


def _add_param(p):
    p.add_argument("--param", action="append", metavar="K=V",
                   help="constructor parameter, repeatable")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sslab",
                                 description="stationary-surface laboratory")
    ap.add_argument("--config", metavar="PATH",
                    help="settings file (key = value); default $SSLAB_CONFIG")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("catalog", help="catalog inspection")
    p.add_argument("action", choices=["list"])
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("analyze", help="full graded analysis of one entry")
    p.add_argument("name")
    _add_param(p)
    p.add_argument("--machine", action="store_true", help="key=value output")
    p.add_argument("--skip-area", action="store_true",
                   help="skip the area-integral curvature route")
    p.add_argument("--figdir", metavar="DIR", help="also render PNG figures")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("mesh", help="sample a mesh and export it")
    p.add_argument("name")
    _add_param(p)
    p.add_argument("--res", type=int, default=None, help="nodes per axis")
    p.add_argument("--sheets", type=int, default=1,
                   help="cover sheets for multivalued surfaces")
    p.add_argument("--proj", default="drop-x4",
                   help="projection: " + ", ".join(_PROJECTIONS) + "c")
    p.add_argument("--window", metavar="SPEC",
                   help="rect:x0,x1,y0,y1 | disc:R | annulus:r_in,r_out")
    p.add_argument("--out", required=True, help="output file (.obj or .ply)")
    p.add_argument("--png", metavar="FILE", help="also render a wireframe PNG")
    p.set_defaults(func=cmd_mesh)

    p = sub.add_parser("locus", help="scan the collision locus")
    p.add_argument("name")
    _add_param(p)
    p.add_argument("--window", metavar="SPEC",
                   help="rect:x0,x1,y0,y1 | disc:R | annulus:r_in,r_out")
    p.add_argument("--grid", type=int, default=None, help="grid nodes per axis")
    p.add_argument("--machine", action="store_true")
    p.add_argument("--png", metavar="FILE", help="render the finding")
    p.set_defaults(func=cmd_locus)

    p = sub.add_parser("scan-4pi", help="collision sweep of the balanced z^m family")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--a", default="0.5", metavar="RE[,IM]")
    p.add_argument("--grid", type=int, default=None)
    p.add_argument("--machine", action="store_true")
    p.set_defaults(func=cmd_scan_4pi)

    p = sub.add_parser("verify", help="run the acceptance suite")
    p.add_argument("--machine", action="store_true")
    p.add_argument("--only", metavar="N[,N...]",
                   help="comma-separated criterion numbers")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = load_settings(args.config)
        return args.func(args, settings)
    except SslabError as ex:
        print(f"error: {ex}", file=sys.stderr)
        return 1
    except OSError as ex:
        print(f"error: {ex}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
