"""CLI: render --preset NAME --data DIR --out DIR --format png,svg"""

from __future__ import annotations

import argparse
import pathlib

from .render import FigureSpec, render


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="render", description="Render figures from sweep CSV output."
    )
    parser.add_argument("--preset", required=True, help="preset name, e.g. fig3c")
    parser.add_argument(
        "--data", required=True, help="directory holding data.csv and manifest.json"
    )
    parser.add_argument("--out", required=True, help="output directory for images")
    parser.add_argument(
        "--format",
        default="png,svg",
        help="comma-separated list of output formats (png, svg)",
    )
    args = parser.parse_args(argv)
    spec = FigureSpec(
        preset=args.preset,
        data_dir=pathlib.Path(args.data),
        out_dir=pathlib.Path(args.out),
        formats=tuple(f.strip() for f in args.format.split(",") if f.strip()),
    )
    for path in render(spec):
        print(path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
