"""Command-line figure renderer for oamsat result CSVs.

Exit codes: 0 success, 2 input/schema error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figures import KINDS, FigureSpec, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oamsat-plots",
        description="render detection-probability figures from result CSVs",
    )
    parser.add_argument(
        "--input",
        action="append",
        required=True,
        help="input CSV (repeat for multi-curve figures)",
    )
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--out", required=True, help="output image path (.png)")
    parser.add_argument(
        "--label",
        action="append",
        default=[],
        help="legend label for the matching --input (repeatable)",
    )
    parser.add_argument("--xlabel", help="x axis label")
    parser.add_argument("--ylabel", help="y axis label")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    axis_labels = None
    if args.xlabel or args.ylabel:
        axis_labels = (args.xlabel or "", args.ylabel or "")
    try:
        spec = FigureSpec(
            inputs=tuple(Path(p) for p in args.input),
            kind=args.kind,
            output=Path(args.out),
            labels=tuple(args.label),
            axis_labels=axis_labels,
        )
        written = render(spec)
    except SchemaError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {written}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
