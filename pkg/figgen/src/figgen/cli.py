"""figgen command line: render figures from steerlab CSV outputs.

Exit codes: 0 success, 2 bad inputs (schema violations, missing files).
"""

from __future__ import annotations

import argparse
import sys

from .render import KINDS, FigureSpec, SchemaError, render, render_all


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="figgen")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one figure or all experiment figures")
    p.add_argument("--kind", choices=KINDS)
    p.add_argument("--inputs", help="comma-separated CSV paths")
    p.add_argument("--out", help="output image path")
    p.add_argument("--labels", default=None, help="comma-separated curve labels")
    p.add_argument("--vstar", type=float, default=None,
                   help="reference commitment value line")
    p.add_argument("--xstar1", type=float, default=None,
                   help="reference first-coordinate line")
    p.add_argument("--title", default=None)
    p.add_argument("--all", dest="all_dir", default=None, metavar="DIR",
                   help="render the standard figures for every experiment under DIR")
    p.add_argument("--out-dir", default=None, help="output directory for --all")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.all_dir:
            written = render_all(args.all_dir, args.out_dir)
            for path in written:
                print(f"wrote {path}")
            return 0
        if not (args.kind and args.inputs and args.out):
            print("error: either --all DIR or all of --kind/--inputs/--out are required",
                  file=sys.stderr)
            return 2
        spec = FigureSpec(kind=args.kind, inputs=args.inputs.split(","),
                          out=args.out,
                          labels=args.labels.split(",") if args.labels else [],
                          v_star=args.vstar, x_star1=args.xstar1, title=args.title)
        print(f"wrote {render(spec)}")
        return 0
    except (SchemaError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
