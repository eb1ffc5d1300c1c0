"""plots <figure-kind> --in <csv...> --out <file>

Renders benchmark CSVs into figures; the output format follows the file
extension (.png or .svg).  Exit status 0 on success, 1 on any input or
schema error.
"""

from __future__ import annotations

import argparse
import sys

from .figures import PlotSpec, render
from .records import FIGURE_KINDS, SchemaError


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise SchemaError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="plots", description=__doc__)
    parser.add_argument("kind", choices=FIGURE_KINDS, help="figure to render")
    parser.add_argument("--in", dest="inputs", nargs="+", required=True, help="input CSV files")
    parser.add_argument("--out", required=True, help="output image path (.png or .svg)")
    parser.add_argument("--xlabel", default="", help="x axis label override")
    parser.add_argument("--ylabel", default="", help="y axis label override")
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        spec = PlotSpec(
            inputs=tuple(args.inputs),
            kind=args.kind,
            out=args.out,
            xlabel=args.xlabel,
            ylabel=args.ylabel,
        )
        out = render(spec)
        print(f"wrote {out}")
        return 0
    except (SchemaError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())
