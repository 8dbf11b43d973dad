#!/usr/bin/env python3
"""Run every figure preset sweep and (optionally) render the figures.

Usage:
    python scripts/run_all_presets.py --out out/ [--presets fig3c,fig6a]
        [--workers 2] [--render]
"""

import argparse
import pathlib
import sys
import time

from hybridspec.sweep import get_preset, list_presets, run_sweep, write_outputs


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out", help="output root directory")
    parser.add_argument(
        "--presets", default=None, help="comma-separated subset (default: all)"
    )
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument(
        "--render", action="store_true", help="also render png+svg (needs hybridfig)"
    )
    args = parser.parse_args(argv)

    names = sorted(list_presets())
    if args.presets:
        names = [n.strip() for n in args.presets.split(",") if n.strip()]
    out_root = pathlib.Path(args.out)

    for name in names:
        t0 = time.perf_counter()
        rows, manifest = run_sweep(get_preset(name), workers=args.workers)
        data_dir = out_root / name
        write_outputs(rows, manifest, data_dir)
        print(f"{name}: {len(rows)} rows in {time.perf_counter() - t0:.1f} s")
        if args.render:
            from hybridfig.render import FigureSpec, render

            for path in render(FigureSpec(name, data_dir, out_root / "figures")):
                print(f"  {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
