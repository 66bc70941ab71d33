"""The `plots` command: render experiment CSVs into PNG charts.

Exit codes: 0 success, 2 validation error (bad arguments, unknown chart,
missing column), 1 runtime failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .csvdata import CsvFormatError
from .render import render
from .specs import FIGURE_SPECS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plots", description="Render simulator CSVs as charts.")
    sub = parser.add_subparsers(dest="command", required=True)
    rend = sub.add_parser("render", help="render CSV(s) to PNG")
    rend.add_argument("--csv", type=Path, help="one CSV file to render")
    rend.add_argument("--all", type=Path, metavar="DIR", help="render every known CSV in DIR")
    rend.add_argument("--out", type=Path, required=True, help="output directory for PNGs")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command != "render":
        parser.error(f"unknown command {args.command}")
    if bool(args.csv) == bool(args.all):
        print("error: give exactly one of --csv or --all", file=sys.stderr)
        return 2
    try:
        targets: list[Path] = []
        if args.csv:
            targets = [args.csv]
        else:
            targets = sorted(
                p for p in args.all.glob("*.csv") if p.stem in FIGURE_SPECS
            )
            if not targets:
                print(f"error: no known experiment CSVs in {args.all}", file=sys.stderr)
                return 2
        for path in targets:
            print(render(path, args.out))
        return 0
    except (KeyError, CsvFormatError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
