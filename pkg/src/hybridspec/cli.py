"""`sweep` command-line entry point."""

from __future__ import annotations

import argparse
import json
import sys

from .sweep import SweepConfig, get_preset, list_presets, run_sweep, write_outputs


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="sweep",
        description="Run a hybrid-model parameter sweep and emit data.csv + manifest.json.",
    )
    ap.add_argument("--config", help="JSON sweep configuration file")
    ap.add_argument("--preset", help="named figure preset (see --list-presets)")
    ap.add_argument("--out", default="sweep_out", help="output directory")
    ap.add_argument("--workers", type=int, default=1, help="parallel grid workers")
    ap.add_argument(
        "--solvers", help="comma-separated subset of exact,grwa,rwa (overrides config)"
    )
    ap.add_argument(
        "--levels", type=int, help="number of exact levels to compute (overrides config)"
    )
    ap.add_argument(
        "--list-presets", action="store_true", help="print the preset catalog and exit"
    )
    return ap


def load_config(args) -> SweepConfig:
    if args.config is None and args.preset is None:
        raise SystemExit("need --config and/or --preset")
    if args.preset is not None:
        config = get_preset(args.preset)
        if args.config is not None:
            # file fields override preset fields
            with open(args.config, encoding="utf-8") as fh:
                overrides = json.load(fh)
            merged = config.to_dict()
            merged.update(overrides)
            config = SweepConfig.from_dict(merged)
    else:
        with open(args.config, encoding="utf-8") as fh:
            config = SweepConfig.from_dict(json.load(fh))
    import dataclasses

    if args.solvers:
        config = dataclasses.replace(config, solvers=tuple(args.solvers.split(",")))
    if args.levels:
        config = dataclasses.replace(config, levels=args.levels)
    return config


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.list_presets:
        for name, cfg in sorted(list_presets().items()):
            axes = ", ".join(
                f"{a.variable} in [{a.start:g}, {a.stop:g}] x{a.count}" for a in cfg.axes
            )
            print(f"{name:8s} solvers={','.join(cfg.solvers):15s} {axes}")
        return 0
    config = load_config(args)
    rows, manifest = run_sweep(config, workers=max(1, args.workers))
    write_outputs(rows, manifest, args.out)
    print(f"{config.name}: {len(rows)} rows -> {args.out}/data.csv", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
