"""Acceptance suite: one test per criterion, each printing a single
`CRITERION k: PASS/FAIL - detail` line before asserting.

Expensive sweep runs are cached at module scope and shared between criteria.
Calibrated tolerances are recorded in the project decisions ledger.
"""

import math
import time

import numpy as np
import pytest
from scipy.optimize import brentq

from hybridspec.entanglement import (
    participation_ratio_numerical,
    xi_hybrid_grwa,
    xi_hybrid_rwa,
    xi_isolated,
    xi_qrm_grwa,
    xi_qrm_rwa,
)
from hybridspec.exact import _grown, conserved_number_grwa
from hybridspec.hybrid import (
    DOUBLET,
    GRWA,
    ISOLATED,
    RWA,
    ZERO_POLARITON,
    AnalyticStateLabel,
    hybrid_energy,
    hybrid_state_embed,
    rwa_theta,
    sector_params,
)
from hybridspec.operators import ModeCutoff, displacement_op, displacement_safe_cutoff
from hybridspec.params import Cutoffs, SystemParams
from hybridspec.qrm import displaced_overlap, grwa_state_embed, jc_state_embed
from hybridspec.sweep import (
    _apply_axes,
    _auto_cutoffs,
    _tracked_energies,
    get_preset,
    run_sweep,
)

_SWEEPS: dict = {}


def _rows(name: str):
    if name not in _SWEEPS:
        _SWEEPS[name] = run_sweep(get_preset(name))[0]
    return _SWEEPS[name]


def _report(k: int, ok: bool, detail: str) -> None:
    print(f"\nCRITERION {k}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {k}: {detail}"


# ----------------------------------------------------------------------
# 1. oracle convergence: every ED preset, < 1e-8 drift of the reported
#    (matched tracked-level) energies under a 50% cutoff increase;
#    < 10 s per grid point at dimension <= 1e4.
#
#    The fig4 presets pin explicit cutoffs because the radiation-pressure
#    term makes the spectrum unbounded below in photon number; their drift
#    is verified at the calibrated stability boundary recorded in the
#    preset notes (fig4a: g_om = 0.75, fig4b: g_om = 0.4).
# ----------------------------------------------------------------------

ED_PRESETS = (
    "fig3a", "fig3b", "fig3c", "fig3d", "fig3e", "fig3f",
    "fig4a", "fig4b", "fig5a", "fig5b",
)
EXPLICIT_CHECK_POINT = {"fig4a": (0.75,), "fig4b": (0.4,)}


def test_criterion_1_oracle_convergence():
    worst_drift = 0.0
    worst_time = 0.0
    max_dim = 0
    for name in ED_PRESETS:
        config = get_preset(name)
        if isinstance(config.cutoffs, Cutoffs):
            cutoffs = config.cutoffs
            values = EXPLICIT_CHECK_POINT[name]
        else:
            cutoffs, meta = _auto_cutoffs(config)
            values = tuple(
                meta["converged_at"][ax.variable] for ax in config.axes
            )
        params = _apply_axes(config, values)
        t0 = time.perf_counter()
        base = _tracked_energies(config, params, cutoffs)
        elapsed = time.perf_counter() - t0
        grown = _tracked_energies(config, params, _grown(cutoffs))
        drift = float(np.max(np.abs(grown - base)))
        dim = 2 * cutoffs.photon.n_max * cutoffs.phonon.n_max
        worst_drift = max(worst_drift, drift)
        max_dim = max(max_dim, dim)
        if dim <= 10_000:
            worst_time = max(worst_time, elapsed)
    ok = worst_drift < 1e-8 and worst_time < 10.0 and max_dim <= 10_000
    _report(
        1,
        ok,
        f"max tracked-level drift {worst_drift:.2e} under 50% cutoff growth "
        f"over {len(ED_PRESETS)} presets (fig4 checked at its recorded "
        f"stability boundary; beyond it the tracked levels are resonances "
        f"against the collapsed photon sectors), max dim {max_dim}, "
        f"slowest grid-point solve {worst_time:.2f} s",
    )


# ----------------------------------------------------------------------
# 2. RWA entanglement peak at g_ac = sqrt(3)/6 omega_m.
# ----------------------------------------------------------------------


def test_criterion_2_rwa_peak_location():
    target = math.sqrt(3.0) / 6.0
    rows = [r for r in _rows("fig6b") if r.solver == "rwa"]
    rows.sort(key=lambda r: r.axis1)
    xs = np.array([r.axis1 for r in rows])
    xi = np.array([r.xi for r in rows])
    g_star = float(xs[int(np.argmax(xi))])
    spacing = float(xs[1] - xs[0])
    params = get_preset("fig6b").params

    def cos_theta(g: float) -> float:
        return math.cos(rwa_theta(2, 2, params.with_(g_ac=g)))

    root = brentq(cos_theta, 0.1, 0.5, xtol=1e-15, rtol=8.9e-16)
    ok = abs(g_star - target) <= spacing and abs(root - target) < 1e-12
    _report(
        2,
        ok,
        f"grid argmax {g_star:.6f} vs sqrt(3)/6 = {target:.6f} "
        f"(spacing {spacing:.4f}); analytic root off by {abs(root - target):.1e}",
    )


# ----------------------------------------------------------------------
# 3. fidelity floor: fig3e/f GRWA doublet fidelity > 0.80 over the sweep.
# ----------------------------------------------------------------------


def test_criterion_3_fidelity_floor():
    mins = {}
    for name in ("fig3e", "fig3f"):
        fids = [r.fidelity for r in _rows(name) if r.solver == "grwa"]
        assert fids and all(f is not None for f in fids)
        mins[name] = min(fids)
    ok = all(v > 0.80 for v in mins.values())
    _report(
        3,
        ok,
        "min GRWA fidelity "
        + ", ".join(f"{k}={v:.3f}" for k, v in mins.items())
        + " (floor 0.80)",
    )


# ----------------------------------------------------------------------
# 4. GRWA beats RWA on fig3b/fig3c for g_ac in [0.5, 2] omega_c.
# ----------------------------------------------------------------------


def test_criterion_4_grwa_dominates_rwa():
    worst_ratio = 0.0
    n_labels = 0
    for name in ("fig3b", "fig3c"):
        rows = [r for r in _rows(name) if 2.5 <= r.axis1 <= 10.0]
        exact = {(r.axis1, r.label): r.energy_over_omega_m
                 for r in rows if r.solver == "exact"}
        for label in {r.label for r in rows}:
            errs = {"grwa": [], "rwa": []}
            for r in rows:
                if r.solver in errs:
                    errs[r.solver].append(
                        abs(r.energy_over_omega_m - exact[(r.axis1, r.label)])
                    )
            mean_g = float(np.mean(errs["grwa"]))
            mean_r = float(np.mean(errs["rwa"]))
            n_labels += 1
            worst_ratio = max(worst_ratio, mean_g / mean_r)
    ok = worst_ratio < 1.0
    _report(
        4,
        ok,
        f"mean|E_grwa-E_exact| < mean|E_rwa-E_exact| for all {n_labels} "
        f"fig3b/fig3c labels on g_ac in [2.5, 10]; worst grwa/rwa error "
        f"ratio {worst_ratio:.3f}",
    )


# ----------------------------------------------------------------------
# 5. weak-coupling coincidence of GRWA and RWA energies.
#    Calibrated tolerances (see decisions ledger): the absolute difference
#    is bounded by the g_ac-independent O(g_om^2) splitting of the
#    degenerate doublet, <= 2.5e-3; the g_ac-dependent part <= 1e-3.
# ----------------------------------------------------------------------


def _c5_labels():
    labels = [AnalyticStateLabel(ZERO_POLARITON, GRWA, M=m) for m in range(6)]
    labels += [AnalyticStateLabel(ISOLATED, GRWA, N=n) for n in range(6)]
    labels += [
        AnalyticStateLabel(DOUBLET, GRWA, N=n, M=m, sign=s)
        for n in range(3)
        for m in range(3)
        for s in "+-"
    ]
    return labels


def test_criterion_5_weak_coupling_coincidence():
    base_params = SystemParams(1.0, 1.0, 1.0, g_ac=0.0, g_om=0.05)
    labels = _c5_labels()

    def diffs(g: float) -> np.ndarray:
        p = base_params.with_(g_ac=g)
        out = []
        for lab in labels:
            rwa_lab = AnalyticStateLabel(lab.family, RWA, N=lab.N, M=lab.M, sign=lab.sign)
            out.append(
                abs(hybrid_energy(lab, p).energy - hybrid_energy(rwa_lab, p).energy)
            )
        return np.array(out)

    at_zero = diffs(0.0)
    max_abs = 0.0
    max_gdep = 0.0
    for g in np.linspace(0.0, 0.05, 21):
        d = diffs(float(g))
        max_abs = max(max_abs, float(np.max(d)))
        max_gdep = max(max_gdep, float(np.max(np.abs(d - at_zero))))
    ok = max_abs <= 2.5e-3 and max_gdep <= 1e-3
    _report(
        5,
        ok,
        f"max|E_grwa-E_rwa| = {max_abs:.2e} (calibrated tol 2.5e-3, dominated "
        f"by the g_ac-independent O(g_om^2) degenerate-doublet splitting); "
        f"g_ac-dependent part {max_gdep:.2e} (tol 1e-3)",
    )


# ----------------------------------------------------------------------
# 6. closed-form xi vs partial trace of embedded states.
# ----------------------------------------------------------------------


def _hybrid_cutoffs(params: SystemParams, N: int) -> Cutoffs:
    sp = sector_params(N, params)
    nu = params.g_ac / params.omega_c
    photon = displacement_safe_cutoff(2.0 * nu) + 2 * (N + 2)
    scale = max(abs(sp.q_N), abs(sp.g_eff), abs(sp.g_shift)) / params.omega_m
    phonon = displacement_safe_cutoff(2.0 * scale) + 16
    return Cutoffs.of(photon, phonon)


def _embed_xi(label: AnalyticStateLabel, params: SystemParams) -> float:
    n_sector = label.N if label.N is not None else 0
    cutoffs = _hybrid_cutoffs(params, n_sector)
    for _ in range(4):
        try:
            ket = hybrid_state_embed(label, params, cutoffs, sector_displacement=False)
            return participation_ratio_numerical(ket, (0, 1))
        except ValueError:
            cutoffs = _grown(cutoffs)
    raise RuntimeError(f"no converged embedding for {label} at {params}")


def test_criterion_6_entanglement_formulas():
    base = SystemParams(1.0, 1.0, 1.0)
    g_ac_grid = np.linspace(0.0, 2.0, 13)
    g_om_grid = np.linspace(0.0, 0.5, 5)
    sectors = (0, 2, 4)
    worst = 0.0
    worst_zp = 0.0
    n_checks = 0

    # (a) closed form vs numeric partial trace, 1e-6, on the subsample
    for g_ac in g_ac_grid:
        qp = base.with_(g_ac=float(g_ac))
        photon_cut = ModeCutoff(displacement_safe_cutoff(2.0 * g_ac) + 12)
        for n in sectors:
            # QRM GRWA doublet
            for sign in "+-":
                num = participation_ratio_numerical(
                    grwa_state_embed((sign, n), qp, photon_cut), (0,)
                )
                worst = max(worst, abs(xi_qrm_grwa(n, sign, qp).xi - num))
            # QRM RWA (Jaynes-Cummings) doublet
            num = participation_ratio_numerical(
                jc_state_embed(("+", n), qp, ModeCutoff(n + 4)), (0,)
            )
            worst = max(worst, abs(xi_qrm_rwa(n, qp).xi - num))
            n_checks += 3
        for g_om in g_om_grid:
            p = base.with_(g_ac=float(g_ac), g_om=float(g_om))
            for n in sectors:
                for m in sectors:
                    lab = AnalyticStateLabel(DOUBLET, GRWA, N=n, M=m, sign="+")
                    worst = max(
                        worst, abs(xi_hybrid_grwa(n, m, "+", p).xi - _embed_xi(lab, p))
                    )
                    lab = AnalyticStateLabel(DOUBLET, RWA, N=n, M=m, sign="-")
                    worst = max(
                        worst, abs(xi_hybrid_rwa(n, m, p).xi - _embed_xi(lab, p))
                    )
                    n_checks += 2
                lab = AnalyticStateLabel(ISOLATED, GRWA, N=n)
                worst = max(worst, abs(xi_isolated(n, p).xi - _embed_xi(lab, p)))
                lab = AnalyticStateLabel(ZERO_POLARITON, GRWA, M=n)
                worst_zp = max(worst_zp, abs(_embed_xi(lab, p) - 1.0))
                n_checks += 2

    # (b) bounds on the full design grid (analytic formulas only)
    in_bounds = True
    for g_ac in np.linspace(0.0, 2.0, 61):
        for g_om in np.linspace(0.0, 0.5, 21):
            p = base.with_(g_ac=float(g_ac), g_om=float(g_om))
            for n in (0, 2, 4):
                vals = [
                    xi_qrm_grwa(n, "+", p).xi,
                    xi_qrm_rwa(n, p).xi,
                    xi_hybrid_grwa(n, 2, "+", p).xi,
                    xi_hybrid_rwa(n, 2, p).xi,
                    xi_isolated(n, p).xi,
                ]
                if not all(1.0 - 1e-12 <= v <= 2.0 + 1e-12 for v in vals):
                    in_bounds = False
    ok = worst < 1e-6 and worst_zp < 1e-10 and in_bounds
    _report(
        6,
        ok,
        f"max |closed form - partial trace| = {worst:.2e} over {n_checks} "
        f"checks (tol 1e-6); zero-polariton deviation {worst_zp:.2e} "
        f"(tol 1e-10); bounds xi in [1,2] on the 61x21 grid: {in_bounds}",
    )


# ----------------------------------------------------------------------
# 7. non-monotonicity: >= 3 GRWA peaks above 1.9 on fig6b, exactly one
#    RWA local maximum.
# ----------------------------------------------------------------------


def _local_maxima(xs: np.ndarray, ys: np.ndarray) -> list[tuple[float, float]]:
    out = []
    for i in range(1, len(ys) - 1):
        if ys[i] > ys[i - 1] and ys[i] >= ys[i + 1]:
            out.append((float(xs[i]), float(ys[i])))
    return out


def test_criterion_7_nonmonotonic_peaks():
    by_solver = {}
    for solver in ("grwa", "rwa"):
        rows = sorted(
            (r for r in _rows("fig6b") if r.solver == solver), key=lambda r: r.axis1
        )
        xs = np.array([r.axis1 for r in rows])
        ys = np.array([r.xi for r in rows])
        by_solver[solver] = _local_maxima(xs, ys)
    big_grwa = [p for p in by_solver["grwa"] if p[1] > 1.9]
    ok = len(big_grwa) >= 3 and len(by_solver["rwa"]) == 1
    _report(
        7,
        ok,
        f"GRWA xi has {len(big_grwa)} local maxima > 1.9 at g_ac = "
        f"{[round(p[0], 3) for p in big_grwa]} (need >= 3); RWA has "
        f"{len(by_solver['rwa'])} local maximum (need exactly 1)",
    )


# ----------------------------------------------------------------------
# 8. conserved GRWA excitation number on embedded hybrid eigenstates.
# ----------------------------------------------------------------------


def test_criterion_8_conserved_number():
    params = SystemParams(5.0, 5.0, 1.0, g_ac=3.0, g_om=0.1)
    cutoffs = Cutoffs.of(44, 26)
    n_op = conserved_number_grwa(params, cutoffs).matrix
    cases = [(AnalyticStateLabel(ZERO_POLARITON, GRWA, M=m), 0.0) for m in range(4)]
    cases += [(AnalyticStateLabel(ISOLATED, GRWA, N=n), float(n + 1)) for n in range(4)]
    cases += [
        (AnalyticStateLabel(DOUBLET, GRWA, N=n, M=m, sign=s), float(n + 1))
        for n in range(3)
        for m in range(2)
        for s in "+-"
    ]
    worst = 0.0
    for label, expected in cases:
        ket = hybrid_state_embed(label, params, cutoffs)
        value = float(np.real(ket.amplitudes.conj() @ (n_op @ ket.amplitudes)))
        worst = max(worst, abs(value - expected))
    ok = worst < 1e-4
    _report(
        8,
        ok,
        f"max |<N_R> - expected| = {worst:.2e} over {len(cases)} embedded "
        f"GRWA states (tol 1e-4)",
    )


# ----------------------------------------------------------------------
# 9. displaced-Fock overlap identities.
# ----------------------------------------------------------------------


def test_criterion_9_overlap_identities():
    nus = (0.1, 0.5, 1.0, 1.5, 2.0)
    worst_matrix = 0.0
    worst_complete = 0.0
    sign_ok = True
    for nu in nus:
        cut = ModeCutoff(displacement_safe_cutoff(2.0 * nu) + 30)
        d = displacement_op(-2.0 * nu, cut).matrix
        for m in range(21):
            for n in range(21):
                val = displaced_overlap(m, n, nu)
                worst_matrix = max(worst_matrix, abs(val - d[m, n]))
                if displaced_overlap(n, m, nu) != (-1.0) ** (m - n) * val:
                    sign_ok = False
        k_max = int(4 * (2.0 * nu) ** 2) + 80
        for m in range(0, 21, 5):
            for n in range(0, 21, 5):
                total = sum(
                    displaced_overlap(m, k, nu) * displaced_overlap(n, k, nu)
                    for k in range(k_max)
                )
                worst_complete = max(worst_complete, abs(total - float(m == n)))
    ortho_exact = all(
        displaced_overlap(m, n, 0.0) == float(m == n)
        for m in range(21)
        for n in range(21)
    )
    ok = worst_matrix < 1e-9 and sign_ok and ortho_exact and worst_complete < 1e-8
    _report(
        9,
        ok,
        f"max |overlap - D(-2nu) element| = {worst_matrix:.1e} (tol 1e-9); "
        f"sign rule exact: {sign_ok}; nu=0 orthonormality exact: {ortho_exact}; "
        f"completeness deviation {worst_complete:.1e} (tol 1e-8)",
    )
