"""Command line: jcpm-fig <figure-id> --csv-dir <dir> --out <dir>."""

from __future__ import annotations

import argparse
import sys

from .recipes import FIGURES, FigureError
from .render import render


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="jcpm-fig",
        description="Render figures from jcpm experiment CSVs (SVG and PNG).")
    parser.add_argument("figure_id", choices=sorted(FIGURES) + ["all"],
                        help="figure to render")
    parser.add_argument("--csv-dir", required=True,
                        help="directory containing the experiment CSVs")
    parser.add_argument("--out", required=True, help="output directory")
    args = parser.parse_args(argv)

    ids = sorted(FIGURES) if args.figure_id == "all" else [args.figure_id]
    try:
        for figure_id in ids:
            for path in render(figure_id, args.csv_dir, args.out):
                print(path)
    except FigureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
