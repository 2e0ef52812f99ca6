"""The ``viz`` command: render figures from kanbench result exports.

    viz violin --in results.json --out fig.png
    viz params --in results.json --out fig.png --log-y

``--in`` may repeat to merge several exports into one figure.  Exit codes:
0 success, 2 bad usage or schema, 3 missing/unreadable files.
"""

from __future__ import annotations

import argparse
import sys

from .bundle import BundleError, load_results
from .render import render_param_bars, render_violins

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 2, 3


def build_parser():
    parser = argparse.ArgumentParser(prog="viz", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    violin = sub.add_parser("violin", help="accuracy distributions, one violin per group")
    params = sub.add_parser("params", help="learnable-parameter counts per group")
    for p in (violin, params):
        p.add_argument("--in", dest="inputs", action="append", required=True,
                       help="results JSON/CSV from the benchmark (repeatable)")
        p.add_argument("--out", required=True, help="output image path")
    params.add_argument("--log-y", action="store_true", help="logarithmic count axis")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        bundle = load_results(args.inputs)
        if args.command == "violin":
            render_violins(bundle, args.out)
        else:
            render_param_bars(bundle, args.out, log_y=args.log_y)
    except FileNotFoundError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DATA
    except (BundleError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    print(f"wrote {args.out}")
    return EXIT_OK


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
