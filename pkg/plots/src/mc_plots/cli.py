"""Command line for figure rendering. Exit codes: 0 ok, 2 bad request, 1 I/O."""

from __future__ import annotations

import argparse
import sys

from .render import InputError, PlotSpec, SpecError, render
from .surface import render_surface


def build_parser():
    parser = argparse.ArgumentParser(prog="mc-plots", description="Sweep figure rendering.")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("render", help="mean-MSE lines with std bands from a summary CSV")
    sp.add_argument("--in", dest="input_csv", required=True, help="summary CSV path")
    sp.add_argument("--axis", required=True, choices=["n", "p"])
    sp.add_argument("--out", required=True, help="output image path")
    sp.add_argument("--methods", help="comma-separated method filter")
    sp.add_argument("--png", action="store_true", help="write PNG instead of SVG")
    sp.add_argument("--logy", action="store_true", help="log-scale the MSE axis")
    sp.set_defaults(func=_cmd_render)

    sp = sub.add_parser("surface", help="heatmap of a built-in latent surface")
    sp.add_argument("--function", required=True, choices=["f1", "f2", "f3"])
    sp.add_argument("--out", required=True)
    sp.add_argument("--png", action="store_true")
    sp.set_defaults(func=_cmd_surface)
    return parser


def _cmd_render(args):
    methods = tuple(m.strip() for m in args.methods.split(",")) if args.methods else ()
    spec = PlotSpec(
        input_csv=args.input_csv, axis=args.axis, output=args.out,
        methods=methods, logy=args.logy, png=args.png,
    )
    out = render(spec)
    print(f"wrote {out}")
    return 0


def _cmd_surface(args):
    out = render_surface(args.function, args.out, png=args.png)
    print(f"wrote {out}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
