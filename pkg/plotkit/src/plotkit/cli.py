"""Command line: `plotkit <kind> --in <csv...> --out <img>`.

Exit codes: 0 rendered, 2 bad inputs (missing file, schema mismatch,
empty data), 3 unexpected rendering failure. No partial images are left
behind on error.
"""

from __future__ import annotations

import argparse
import os
import sys

from .render import PlotJob, plot
from .schemas import SCHEMAS, SchemaError


def build_parser():
    ap = argparse.ArgumentParser(
        prog="plotkit",
        description="Render figures from benchmark CSV artifacts.")
    sub = ap.add_subparsers(dest="kind", required=True)
    helps = {
        "curves": "force-curve panels from a curve-sample CSV",
        "hold": "joint-angle hold traces from time-trace CSVs",
        "learning": "learning curves from training-curve CSVs",
        "hop": "body-height traces from time-trace CSVs",
        "beta-map": "velocity-gain stability heatmap from a sweep CSV",
    }
    for kind in SCHEMAS:
        p = sub.add_parser(kind, help=helps[kind])
        p.add_argument("--in", dest="inputs", nargs="+", required=True,
                       metavar="CSV", help="input CSV file(s)")
        p.add_argument("--out", required=True, metavar="IMG",
                       help="output image path (.png, .pdf, .svg)")
        p.add_argument("--title", default=None, help="optional figure title")
    return ap


def entry(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        job = PlotJob(kind=args.kind, inputs=tuple(args.inputs),
                      output=args.out, title=args.title)
        plot(job)
        print(f"wrote {args.out}")
        return 0
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        _remove_partial(args.out)
        return 2
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        _remove_partial(args.out)
        return 3


def _remove_partial(path):
    try:
        if os.path.isfile(path):
            os.remove(path)
    except OSError:
        pass


def main():
    raise SystemExit(entry())
