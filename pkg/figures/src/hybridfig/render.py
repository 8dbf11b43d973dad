"""Figure rendering: pure function of (CSV content, figure spec).

No numerics happen here; every plotted value comes straight from the sweep
CSV. SVG output is deterministic: the hash salt is pinned to the preset name
and the Date metadata is suppressed.
"""

from __future__ import annotations

import pathlib
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

from .io import SweepData, load_sweep

LINE_STYLE = {"exact": "-", "grwa": "--", "rwa": "-."}
SOLVER_NAME = {"exact": "exact", "grwa": "GRWA", "rwa": "RWA"}
AXIS_LABEL = {
    "g_ac": r"$g_{ac}/\omega_m$",
    "g_om": r"$g_{om}/\omega_m$",
    "omega_a": r"$\omega_a/\omega_m$",
    "omega_c": r"$\omega_c/\omega_m$",
}
_COLORS = plt.rcParams["axes.prop_cycle"].by_key()["color"]


@dataclass(frozen=True)
class FigureSpec:
    preset: str
    data_dir: pathlib.Path
    out_dir: pathlib.Path
    formats: tuple[str, ...] = ("png", "svg")

    def __post_init__(self):
        bad = [f for f in self.formats if f not in ("png", "svg")]
        if bad:
            raise ValueError(f"unsupported formats: {bad}")


def _label_text(row) -> str:
    bits = [str(row["family"])]
    if pd.notna(row["N"]):
        bits.append(f"N={int(row['N'])}")
    if pd.notna(row["M"]):
        bits.append(f"M={int(row['M'])}")
    if pd.notna(row["sign"]) and row["sign"]:
        bits.append(str(row["sign"]))
    return " ".join(bits)


def _label_groups(frame: pd.DataFrame):
    keys = frame[["family", "N", "M", "sign"]].drop_duplicates()
    for idx, (_, key) in enumerate(keys.iterrows()):
        mask = (
            (frame["family"] == key["family"])
            & (frame["N"].isna() if pd.isna(key["N"]) else frame["N"] == key["N"])
            & (frame["M"].isna() if pd.isna(key["M"]) else frame["M"] == key["M"])
            & (
                frame["sign"].isna()
                if pd.isna(key["sign"])
                else frame["sign"] == key["sign"]
            )
        )
        yield idx, _label_text(key), frame[mask]


def _coupling_marker(ax, data: SweepData) -> None:
    # dashed marker at g_ac = omega_c: the boundary between the ultra-strong
    # and deep-strong coupling regimes
    axis = data.axes[0]
    omega_c = data.params["omega_c"]
    if axis["variable"] == "g_ac" and axis["start"] < omega_c < axis["stop"]:
        ax.axvline(omega_c, color="0.5", linestyle=":", linewidth=0.8)


def _plot_lines(ax, data: SweepData, column: str, solvers: list[str]) -> None:
    frame = data.frame
    for idx, name, block in _label_groups(frame):
        color = _COLORS[idx % len(_COLORS)]
        for solver in solvers:
            sub = block[block["solver"] == solver]
            if sub.empty or sub[column].isna().all():
                continue
            suffix = f" ({SOLVER_NAME[solver]})" if len(solvers) > 1 else ""
            ax.plot(
                sub["axis1"],
                sub[column],
                linestyle=LINE_STYLE[solver],
                color=color,
                linewidth=1.2,
                label=f"{name}{suffix}",
            )
    ax.set_xlabel(AXIS_LABEL.get(data.axes[0]["variable"], data.axes[0]["variable"]))
    _coupling_marker(ax, data)


def _solvers_in(data: SweepData) -> list[str]:
    present = set(data.frame["solver"])
    return [s for s in ("exact", "grwa", "rwa") if s in present]


def _fig_rates(data: SweepData):
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    _plot_lines(ax, data, "energy_over_omega_m", _solvers_in(data))
    ax.set_ylabel(r"rate $/\omega_m$")
    ax.legend(fontsize=8)
    return fig


def _fig_levels(data: SweepData):
    has_fidelity = "fidelities" in data.outputs
    n_panels = 2 if has_fidelity else 1
    fig, axes = plt.subplots(
        n_panels, 1, figsize=(5.0, 3.0 * n_panels), sharex=True, squeeze=False
    )
    _plot_lines(axes[0, 0], data, "energy_over_omega_m", _solvers_in(data))
    axes[0, 0].set_ylabel(r"$E/\omega_m$")
    axes[0, 0].legend(fontsize=7, ncol=2)
    if has_fidelity:
        _plot_lines(axes[1, 0], data, "fidelity", ["grwa", "rwa"])
        axes[1, 0].set_ylabel("fidelity")
        axes[1, 0].set_ylim(0.0, 1.05)
    return fig


def _fig_levels_xi(data: SweepData):
    fig, axes = plt.subplots(2, 1, figsize=(5.0, 6.0), sharex=True)
    _plot_lines(axes[0], data, "energy_over_omega_m", _solvers_in(data))
    axes[0].set_ylabel(r"$E/\omega_m$")
    axes[0].legend(fontsize=7)
    _plot_lines(axes[1], data, "xi", _solvers_in(data))
    axes[1].set_ylabel(r"$\xi$")
    axes[1].set_ylim(0.95, 2.05)
    return fig


def _fig_xi_line(data: SweepData):
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    _plot_lines(ax, data, "xi", _solvers_in(data))
    ax.set_ylabel(r"$\xi$")
    ax.set_ylim(0.95, 2.05)
    ax.legend(fontsize=8)
    return fig


def _fig_map(data: SweepData):
    frame = data.frame
    xs = np.sort(frame["axis1"].unique())
    ys = np.sort(frame["axis2"].unique())
    grid = frame.pivot_table(index="axis2", columns="axis1", values="xi").to_numpy()
    fig, ax = plt.subplots(figsize=(5.4, 3.6))
    mesh = ax.pcolormesh(xs, ys, grid, cmap="viridis", vmin=1.0, vmax=2.0, shading="auto")
    fig.colorbar(mesh, ax=ax, label=r"$\xi$")
    ax.set_xlabel(AXIS_LABEL.get(data.axes[0]["variable"], data.axes[0]["variable"]))
    ax.set_ylabel(AXIS_LABEL.get(data.axes[1]["variable"], data.axes[1]["variable"]))
    return fig


def _fig_xi_cuts(data: SweepData):
    # one-dimensional cuts along axis2, one line per (axis1 value, solver)
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    frame = data.frame
    for idx, a1 in enumerate(np.sort(frame["axis1"].unique())):
        color = _COLORS[idx % len(_COLORS)]
        for solver in _solvers_in(data):
            sub = frame[(frame["axis1"] == a1) & (frame["solver"] == solver)]
            if sub.empty:
                continue
            ax.plot(
                sub["axis2"],
                sub["xi"],
                linestyle=LINE_STYLE[solver],
                color=color,
                linewidth=1.2,
                label=f"$g_{{ac}}={a1:g}$ ({SOLVER_NAME[solver]})",
            )
    ax.set_xlabel(AXIS_LABEL.get(data.axes[1]["variable"], data.axes[1]["variable"]))
    ax.set_ylabel(r"$\xi$")
    ax.set_ylim(0.95, 2.05)
    ax.legend(fontsize=8)
    return fig


_LAYOUTS = {
    "fig2a": _fig_rates,
    "fig2b": _fig_rates,
    "fig3a": _fig_levels,
    "fig3b": _fig_levels,
    "fig3c": _fig_levels,
    "fig3d": _fig_levels,
    "fig3e": _fig_levels,
    "fig3f": _fig_levels,
    "fig4a": _fig_levels,
    "fig4b": _fig_levels,
    "fig5a": _fig_levels_xi,
    "fig5b": _fig_levels_xi,
    "fig6a": _fig_map,
    "fig6b": _fig_xi_line,
    "fig6c": _fig_map,
    "fig6d": _fig_xi_cuts,
}


def render(spec: FigureSpec) -> list[pathlib.Path]:
    if spec.preset not in _LAYOUTS:
        raise ValueError(f"unknown preset {spec.preset!r}; known: {sorted(_LAYOUTS)}")
    data = load_sweep(spec.data_dir)
    if data.name != spec.preset:
        raise ValueError(
            f"manifest is for preset {data.name!r}, not requested {spec.preset!r}"
        )
    out_dir = pathlib.Path(spec.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[pathlib.Path] = []
    with matplotlib.rc_context({"svg.hashsalt": spec.preset}):
        fig = _LAYOUTS[spec.preset](data)
        fig.suptitle(spec.preset)
        try:
            for fmt in spec.formats:
                path = out_dir / f"{spec.preset}.{fmt}"
                metadata = {"Date": None} if fmt == "svg" else None
                fig.savefig(path, format=fmt, dpi=150, metadata=metadata)
                written.append(path)
        finally:
            plt.close(fig)
    return written
