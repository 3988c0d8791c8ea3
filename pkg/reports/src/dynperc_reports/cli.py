"""Command line front end.

Two subcommands mirror the two operations: `render` draws one figure from
CSV inputs, `summarize` writes the markdown report over a manifest set.
Everything is single-threaded; there is nothing here worth parallelizing.
"""

from __future__ import annotations

import argparse
import sys

from .errors import EmptyInputError, ReportError, SchemaError
from .figures import KINDS, FigureSpec, render
from .report import summarize


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dynperc-report")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_render = sub.add_parser("render", help="draw one figure from CSV inputs")
    p_render.add_argument("--kind", required=True, choices=KINDS)
    p_render.add_argument("--out", required=True, help="image path (.png or .svg)")
    p_render.add_argument("--caption", default="", help="caption text for the sidecar")
    p_render.add_argument("inputs", nargs="+", help="input CSV paths; meaning depends on --kind")

    p_sum = sub.add_parser("summarize", help="write a markdown report over manifests")
    p_sum.add_argument("--out", required=True, help="markdown output path")
    p_sum.add_argument("--results", default=None, help="acceptance results CSV to tabulate")
    p_sum.add_argument("--figure", action="append", default=[], help="figure image to link (repeatable)")
    p_sum.add_argument("manifests", nargs="+", help="manifest.json paths")

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.subcommand == "render":
            spec = FigureSpec(args.kind, tuple(args.inputs), args.out, args.caption)
            out = render(spec)
            print(f"render: {args.kind} -> {out}")
        else:
            out = summarize(args.manifests, args.out, figures=args.figure, results_csv=args.results)
            print(f"summarize: {len(args.manifests)} manifests -> {out}")
    except (SchemaError, EmptyInputError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 3
    except ReportError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
