"""Tests for the sweep driver and CLI: config validation and round-trips,
presets, determinism, row-count invariants, and solver agreement limits."""

import json

import numpy as np
import pytest

from hybridspec.cli import main
from hybridspec.params import Cutoffs, SystemParams
from hybridspec.sweep import (
    Axis,
    CSV_HEADER,
    EXACT,
    GRWA,
    LabelSpec,
    RWA,
    SweepConfig,
    _fmt,
    get_preset,
    list_presets,
    rows_to_csv,
    run_sweep,
    write_outputs,
)

PRESET_NAMES = [
    "fig2a", "fig2b",
    "fig3a", "fig3b", "fig3c", "fig3d", "fig3e", "fig3f",
    "fig4a", "fig4b", "fig5a", "fig5b",
    "fig6a", "fig6b", "fig6c", "fig6d",
]


def _analytic_config(**overrides):
    base = dict(
        name="tiny",
        params=SystemParams(1.0, 1.0, 1.0, g_om=0.05),
        axes=(Axis("g_ac", 0.0, 1.0, 3),),
        labels=(LabelSpec("doublet", N=0, M=0, sign="+"),),
        solvers=(GRWA, RWA),
        outputs=("energies", "xi"),
        cutoffs=None,
    )
    base.update(overrides)
    return SweepConfig(**base)


def test_axis_validation_and_values():
    with pytest.raises(ValueError):
        Axis("bogus", 0.0, 1.0, 5)
    with pytest.raises(ValueError):
        Axis("g_ac", 0.0, 1.0, 1)
    with pytest.raises(ValueError):
        Axis("g_ac", 0.0, 1.0, 5, scale="sqrt")
    with pytest.raises(ValueError):
        Axis("g_ac", 0.0, 1.0, 5, scale="log")
    lin = Axis("g_ac", 0.0, 2.0, 5).values()
    np.testing.assert_allclose(lin, [0.0, 0.5, 1.0, 1.5, 2.0])
    log = Axis("g_om", 0.01, 1.0, 3, scale="log").values()
    np.testing.assert_allclose(log, [0.01, 0.1, 1.0])


def test_label_spec_validation():
    with pytest.raises(ValueError):
        LabelSpec("bogus", N=0)
    with pytest.raises(ValueError):
        LabelSpec("qrm_doublet", N=0)  # missing sign
    with pytest.raises(ValueError):
        LabelSpec("T_N")  # missing N
    with pytest.raises(ValueError):
        LabelSpec("doublet", N=0, M=0)  # missing sign
    assert LabelSpec("T_N", N=2).solvers() == (GRWA,)


def test_config_validation():
    with pytest.raises(ValueError, match="axes"):
        _analytic_config(axes=())
    with pytest.raises(ValueError, match="label"):
        _analytic_config(labels=())
    with pytest.raises(ValueError, match="solver"):
        _analytic_config(solvers=("euler",))
    with pytest.raises(ValueError, match="cutoffs"):
        _analytic_config(solvers=(EXACT,), cutoffs=None)


def test_config_json_round_trip_and_hash():
    cfg = _analytic_config(cutoffs=Cutoffs.of(12, 10), solvers=(EXACT, GRWA))
    blob = json.dumps(cfg.to_dict())
    again = SweepConfig.from_dict(json.loads(blob))
    assert again == cfg
    assert again.config_hash() == cfg.config_hash()
    assert _analytic_config().config_hash() != cfg.config_hash()


def test_preset_catalog():
    presets = list_presets()
    assert sorted(presets) == sorted(PRESET_NAMES)
    for name, cfg in presets.items():
        assert cfg.name == name
        assert 1 <= len(cfg.axes) <= 2
        assert cfg.labels
    with pytest.raises(KeyError):
        get_preset("fig99")


def test_fmt_17_significant_digits():
    assert _fmt(1.0 / 3.0) == "0.33333333333333331"
    assert _fmt(None) == ""
    assert _fmt(2) == "2"


def test_rows_to_csv_schema_and_determinism():
    cfg = _analytic_config()
    rows1, man1 = run_sweep(cfg)
    rows2, _ = run_sweep(cfg)
    csv1, csv2 = rows_to_csv(rows1), rows_to_csv(rows2)
    assert csv1 == csv2
    lines = csv1.splitlines()
    assert lines[0] == CSV_HEADER
    # row count = grid x labels x solvers
    assert len(lines) - 1 == 3 * 1 * 2 == man1["rows"]
    assert man1["config_hash"] == cfg.config_hash()


def test_row_count_invariant_on_analytic_presets():
    for name in ("fig2b", "fig6d"):
        cfg = get_preset(name)
        rows, man = run_sweep(cfg)
        grid = int(np.prod([ax.count for ax in cfg.axes]))
        assert len(rows) == grid * len(cfg.labels) * len(cfg.solvers) == man["rows"]


def test_parallel_workers_match_serial():
    cfg = _analytic_config()
    serial, _ = run_sweep(cfg, workers=1)
    parallel, _ = run_sweep(cfg, workers=2)
    assert rows_to_csv(serial) == rows_to_csv(parallel)


def test_zero_coupling_sweep_identical_ladders_across_solvers():
    cfg = SweepConfig(
        name="ladder",
        params=SystemParams(5.0, 3.0, 1.0),
        axes=(Axis("g_ac", 0.0, 0.0, 2),),
        labels=(
            LabelSpec("zero_polariton", M=0),
            LabelSpec("zero_polariton", M=1),
            LabelSpec("isolated", N=0),
            LabelSpec("doublet", N=0, M=0, sign="+"),
            LabelSpec("doublet", N=0, M=0, sign="-"),
        ),
        solvers=(EXACT, GRWA, RWA),
        outputs=("energies", "fidelities"),
        cutoffs=Cutoffs.of(8, 8),
        levels=24,
    )
    rows, _ = run_sweep(cfg)
    by_label = {}
    for r in rows:
        by_label.setdefault((r.axis1, r.label), {})[r.solver] = r
    for (_, label), per_solver in by_label.items():
        assert set(per_solver) == {EXACT, GRWA, RWA}
        energies = [r.energy_over_omega_m for r in per_solver.values()]
        assert max(energies) - min(energies) < 1e-9
        for solver in (GRWA, RWA):
            assert per_solver[solver].fidelity == pytest.approx(1.0, abs=1e-9)


def test_write_outputs_and_cli(tmp_path):
    out = tmp_path / "run"
    rc = main(["--preset", "fig2a", "--out", str(out)])
    assert rc == 0
    csv_text = (out / "data.csv").read_text(encoding="utf-8")
    lines = csv_text.splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) - 1 == 201  # 201 grid points x 1 label x 1 solver
    assert "\r" not in csv_text
    manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["name"] == "fig2a"
    assert manifest["schema"] == CSV_HEADER.split(",")
    # byte-identical rerun of the CSV
    first = (out / "data.csv").read_bytes()
    assert main(["--preset", "fig2a", "--out", str(out)]) == 0
    assert (out / "data.csv").read_bytes() == first


def test_cli_config_overrides_preset(tmp_path):
    override = {"axes": [{"variable": "g_ac", "start": 0.0, "stop": 1.0, "count": 4}]}
    cfg_file = tmp_path / "override.json"
    cfg_file.write_text(json.dumps(override), encoding="utf-8")
    out = tmp_path / "run"
    rc = main(["--preset", "fig2a", "--config", str(cfg_file), "--out", str(out)])
    assert rc == 0
    lines = (out / "data.csv").read_text(encoding="utf-8").splitlines()
    assert len(lines) - 1 == 4


def test_cli_list_presets(capsys):
    assert main(["--list-presets"]) == 0
    shown = capsys.readouterr().out
    for name in PRESET_NAMES:
        assert name in shown


def test_cli_requires_config_or_preset():
    with pytest.raises(SystemExit):
        main([])
