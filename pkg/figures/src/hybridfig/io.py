"""Loading and validation of sweep output directories (data.csv + manifest.json)."""

from __future__ import annotations

import json
import pathlib
from dataclasses import dataclass

import pandas as pd

EXPECTED_SCHEMA = [
    "axis1",
    "axis2",
    "solver",
    "family",
    "N",
    "M",
    "sign",
    "energy_over_omega_m",
    "fidelity",
    "xi",
]


@dataclass(frozen=True)
class SweepData:
    name: str
    manifest: dict
    frame: pd.DataFrame

    @property
    def params(self) -> dict:
        return self.manifest["config"]["params"]

    @property
    def axes(self) -> list[dict]:
        return self.manifest["config"]["axes"]

    @property
    def outputs(self) -> list[str]:
        return list(self.manifest["config"]["outputs"])


def load_sweep(data_dir: str | pathlib.Path) -> SweepData:
    data_dir = pathlib.Path(data_dir)
    csv_path = data_dir / "data.csv"
    manifest_path = data_dir / "manifest.json"
    if not csv_path.is_file():
        raise FileNotFoundError(f"no data.csv in {data_dir}")
    if not manifest_path.is_file():
        raise FileNotFoundError(f"no manifest.json in {data_dir}")
    with open(manifest_path, encoding="utf-8") as fh:
        manifest = json.load(fh)
    schema = manifest.get("schema")
    if schema != EXPECTED_SCHEMA:
        raise ValueError(f"manifest schema mismatch: {schema!r} != {EXPECTED_SCHEMA!r}")
    frame = pd.read_csv(csv_path, dtype={"sign": "string", "solver": "string"})
    missing = [c for c in EXPECTED_SCHEMA if c not in frame.columns]
    if missing:
        raise ValueError(f"data.csv is missing columns: {missing}")
    if len(frame) == 0:
        raise ValueError(f"data.csv in {data_dir} contains no rows")
    declared = manifest.get("rows")
    if declared is not None and declared != len(frame):
        raise ValueError(
            f"manifest declares {declared} rows but data.csv has {len(frame)}"
        )
    return SweepData(name=manifest["name"], manifest=manifest, frame=frame)
