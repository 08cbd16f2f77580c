"""Argument handling for render.py."""

from __future__ import annotations

import argparse
import sys

from . import KINDS, FigureSpec, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="render.py", description="Render figures from boxball outputs"
    )
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument(
        "--in", dest="inputs", action="append", required=True, help="input CSV/JSON (repeatable)"
    )
    parser.add_argument("--out", required=True, help="output image path (PNG)")
    parser.add_argument("--ref", help="reference CDF table for --kind cdf")
    parser.add_argument("--title")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(args.kind, args.inputs, args.out, reference=args.ref, title=args.title)
    try:
        render(spec)
    except (SchemaError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
