"""Command line for figure generation.  Exit codes: 0 ok, 2 bad input."""

from __future__ import annotations

import argparse
import sys

from .figures import (
    FigureSpec,
    plot_complex_time_map,
    plot_phase_diagram,
    plot_pulse_contour,
)
from .schema import SchemaError


def _parse_points(items) -> tuple:
    out = []
    for item in items or ():
        parts = item.split(":")
        if len(parts) not in (2, 3):
            raise SchemaError(f"expected alpha:eps_ratio[:label], got {item!r}")
        label = parts[2] if len(parts) == 3 else ""
        out.append((float(parts[0]), float(parts[1]), label))
    return tuple(out)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="epencircle-plot",
        description="Render figures from the simulator's CSV/JSON outputs.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("phase", help="survival-probability heatmap")
    sp.add_argument("--sweep", required=True)
    sp.add_argument("--separatrix")
    sp.add_argument("--out", required=True, help="output base path (no extension)")
    sp.add_argument("--cmap", default="viridis")
    sp.add_argument("--log", action="store_true")
    sp.add_argument("--point", action="append", metavar="ALPHA:EPS[:LABEL]")
    sp.add_argument("--no-annotate", action="store_true")
    sp.set_defaults(kind="phase")

    sp = sub.add_parser("complex-map", help="energy-split map in complex time")
    sp.add_argument("--field", required=True)
    sp.add_argument("--dyn-eps")
    sp.add_argument("--out", required=True)
    sp.add_argument("--cmap", default="magma")
    sp.add_argument("--no-annotate", action="store_true")
    sp.set_defaults(kind="complex-map")

    sp = sub.add_parser("contour", help="pulse path in the frequency-strength plane")
    sp.add_argument("--contour", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--no-annotate", action="store_true")
    sp.set_defaults(kind="contour")

    return ap


def cli_main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        if args.kind == "phase":
            spec = FigureSpec(
                out_base=args.out,
                sweep_path=args.sweep,
                separatrix_path=args.separatrix,
                cmap=args.cmap,
                log_scale=args.log,
                annotate=not args.no_annotate,
                marked_points=_parse_points(args.point),
            )
            written = plot_phase_diagram(spec)
        elif args.kind == "complex-map":
            spec = FigureSpec(
                out_base=args.out,
                field_path=args.field,
                dyn_eps_path=args.dyn_eps,
                cmap=args.cmap,
                annotate=not args.no_annotate,
            )
            written = plot_complex_time_map(spec)
        else:
            spec = FigureSpec(
                out_base=args.out,
                contour_path=args.contour,
                annotate=not args.no_annotate,
            )
            written = plot_pulse_contour(spec)
    except (SchemaError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for path in written:
        print(path)
    return 0


def main() -> None:
    raise SystemExit(cli_main())


if __name__ == "__main__":
    main()
