"""Analytic spectrum of the hybrid atom-photon-phonon model.

Each GRWA polariton sector N reduces to a spin-boson block
H(N) = C_N + omega_m b_N^dag b_N + (T_N/2) sigma_z + g_eff (b_N^dag + b_N) sigma_x
after displacing the phonons by q_N/omega_m, and a second GRWA on that block
gives three analytic families: the zero-polariton ladder, one isolated state
per sector, and dressed polariton-phonon doublets.  The RWA-RWA baseline is
produced by the same pipeline with Jaynes-Cummings substitutions
(beta_N, R_N in place of alpha_N, T_N; polariton-phonon coupling g_om/2 with
bare JC matrix elements and no second displacement).

Mean-term sign in the doublet energies: the 2x2 block diagonalization gives
(1/4)(Omega'_{M,M} - Omega'_{M+1,M+1}); this is what the g_om -> 0 limit and
the block-residual checks require, and it is what is implemented here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .operators import (
    Ket,
    PHONON,
    SpaceLayout,
    displacement_op,
    kron,
)
from .params import Cutoffs, SystemParams
from .qrm import (
    QrmGrwaQuantities,
    _mixing_angle,
    displaced_overlap,
    grwa_frequencies,
    grwa_ground_energy,
    grwa_state_embed,
    jc_quantities,
    jc_state_embed,
)

GRWA = "grwa"
RWA = "rwa"

ZERO_POLARITON = "zero_polariton"
ISOLATED = "isolated"
DOUBLET = "doublet"


@dataclass(frozen=True)
class AnalyticStateLabel:
    """Symbolic identity of an approximate hybrid eigenstate."""

    family: str                  # zero_polariton | isolated | doublet
    scheme: str = GRWA           # grwa | rwa
    N: int | None = None         # polariton sector (isolated, doublet)
    M: int | None = None         # phonon quantum number (zero_polariton, doublet)
    sign: str | None = None      # doublet branch "+" or "-"

    def __post_init__(self):
        if self.family not in (ZERO_POLARITON, ISOLATED, DOUBLET):
            raise ValueError(f"unknown family {self.family!r}")
        if self.scheme not in (GRWA, RWA):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.family == ZERO_POLARITON and (self.M is None or self.M < 0):
            raise ValueError("zero_polariton labels need M >= 0")
        if self.family == ISOLATED and (self.N is None or self.N < 0):
            raise ValueError("isolated labels need N >= 0")
        if self.family == DOUBLET:
            if self.N is None or self.M is None or self.N < 0 or self.M < 0:
                raise ValueError("doublet labels need N, M >= 0")
            if self.sign not in ("+", "-"):
                raise ValueError("doublet labels need sign '+' or '-'")

    def sort_key(self):
        return (
            self.scheme,
            self.family,
            -1 if self.N is None else self.N,
            -1 if self.M is None else self.M,
            self.sign or "",
        )


@dataclass(frozen=True)
class HybridSectorParams:
    """Per-sector constants of the displaced spin-boson block."""

    N: int
    k_N: float
    q_N: float
    q_G: float
    C_N: float
    g_shift: float
    g_eff: float
    qrm: QrmGrwaQuantities


@dataclass(frozen=True)
class PolaritonPhononQuantities:
    N: int
    M: int
    OmegaP_M_M1: float     # Omega'_{M,M+1} = T_N <M_-'|M+1_+'>
    OmegaP_M_M: float      # T_N <M_-'|M_+'>
    OmegaP_M1_M1: float    # T_N <M+1_-'|M+1_+'>
    DeltaP_NM: float
    phi_NM: float


@dataclass(frozen=True)
class HybridEnergyRecord:
    label: AnalyticStateLabel
    energy: float
    params: SystemParams


def q_ground(params: SystemParams) -> float:
    """Phonon displacement of the zero-polariton family, q_G = g_om g_ac^2/omega_c^2."""
    return params.g_om * params.nu**2


def sector_params(N: int, params: SystemParams) -> HybridSectorParams:
    if N < 0:
        raise ValueError("N must be >= 0")
    q = grwa_frequencies(N, params)
    nu2 = params.nu**2
    omega_nn = params.omega_a * q.overlap_NN
    omega_n1n1 = params.omega_a * q.overlap_N1N1
    k_n = params.omega_c * (N + 0.5 - nu2) + 0.25 * (omega_nn - omega_n1n1)
    q_n = params.g_om * (N + 0.5 + nu2)
    sin_a, cos_a = math.sin(q.alpha_N), math.cos(q.alpha_N)
    ratio = q.Omega_N / params.omega_c
    g_shift = 0.5 * params.g_om * (ratio * sin_a - cos_a)
    g_eff = 0.5 * params.g_om * (sin_a + ratio * cos_a)
    return HybridSectorParams(
        N=N,
        k_N=k_n,
        q_N=q_n,
        q_G=q_ground(params),
        C_N=k_n - q_n**2 / params.omega_m,
        g_shift=g_shift,
        g_eff=g_eff,
        qrm=q,
    )


def phonon_displaced_overlap(M: int, Mp: int, N: int, params: SystemParams) -> float:
    """<M_-'|Mp_+'> for sector N; the common q_N displacement cancels and the
    value is displaced_overlap at nu = g_eff / omega_m."""
    if M < 0 or Mp < 0:
        raise ValueError("phonon indices must be non-negative")
    sp = sector_params(N, params)
    return displaced_overlap(M, Mp, sp.g_eff / params.omega_m)


def polariton_phonon_quantities(
    N: int, M: int, params: SystemParams, sp: HybridSectorParams | None = None
) -> PolaritonPhononQuantities:
    """Polariton-phonon Rabi frequency, detuning and mixing angle phi_NM."""
    sp = sp or sector_params(N, params)
    nu_m = sp.g_eff / params.omega_m
    t = sp.qrm.T_N
    o_mm = displaced_overlap(M, M, nu_m)
    o_m1m1 = displaced_overlap(M + 1, M + 1, nu_m)
    o_mm1 = displaced_overlap(M, M + 1, nu_m)
    omega_p = t * o_mm1
    delta_p = 0.5 * t * (o_mm + o_m1m1) - params.omega_m
    return PolaritonPhononQuantities(
        N=N,
        M=M,
        OmegaP_M_M1=omega_p,
        OmegaP_M_M=t * o_mm,
        OmegaP_M1_M1=t * o_m1m1,
        DeltaP_NM=delta_p,
        phi_NM=_mixing_angle(omega_p, delta_p),
    )


# ---------------------------------------------------------------------------
# GRWA-GRWA energies
# ---------------------------------------------------------------------------

def energy_zero_polariton(M: int, params: SystemParams) -> HybridEnergyRecord:
    """E_M = omega_m M - q_G^2/omega_m + E_G^grwa."""
    if M < 0:
        raise ValueError("M must be >= 0")
    e = (
        params.omega_m * M
        - q_ground(params) ** 2 / params.omega_m
        + grwa_ground_energy(params)
    )
    return HybridEnergyRecord(AnalyticStateLabel(ZERO_POLARITON, GRWA, M=M), e, params)


def energy_isolated(N: int, params: SystemParams) -> HybridEnergyRecord:
    """E_G^(N) = C_N - g_eff^2/omega_m - (T_N/2) <0_-'|0_+'>."""
    sp = sector_params(N, params)
    overlap00 = displaced_overlap(0, 0, sp.g_eff / params.omega_m)
    e = sp.C_N - sp.g_eff**2 / params.omega_m - 0.5 * sp.qrm.T_N * overlap00
    return HybridEnergyRecord(AnalyticStateLabel(ISOLATED, GRWA, N=N), e, params)


def energy_doublet(N: int, M: int, sign: str, params: SystemParams) -> HybridEnergyRecord:
    """Dressed polariton-phonon doublet energies of sector N."""
    sp = sector_params(N, params)
    pq = polariton_phonon_quantities(N, M, params, sp)
    center = (
        sp.C_N
        + params.omega_m * (M + 0.5)
        - sp.g_eff**2 / params.omega_m
        + 0.25 * (pq.OmegaP_M_M - pq.OmegaP_M1_M1)
    )
    half_split = 0.5 * math.hypot(pq.DeltaP_NM, pq.OmegaP_M_M1)
    e = center + half_split if sign == "+" else center - half_split
    return HybridEnergyRecord(
        AnalyticStateLabel(DOUBLET, GRWA, N=N, M=M, sign=sign), e, params
    )


# ---------------------------------------------------------------------------
# RWA-RWA baseline energies
# ---------------------------------------------------------------------------

def rwa_theta(N: int, M: int, params: SystemParams) -> float:
    """Mixing angle theta^(N)_M with tan theta = -g_om sqrt(M+1)/(R_N - omega_m)."""
    r = jc_quantities(N, params).R_N
    off = params.g_om * math.sqrt(M + 1.0)
    det = r - params.omega_m
    if off == 0.0 and det == 0.0:
        return math.pi / 2.0
    return _mixing_angle(off, det)


def rwa_sector_constant(N: int, params: SystemParams) -> float:
    """C_N^rwa = omega_c (N + 1/2) - q_rwa^2/omega_m with q_rwa = g_om (N + 1/2)."""
    q = params.g_om * (N + 0.5)
    return params.omega_c * (N + 0.5) - q**2 / params.omega_m


def rwa_energy(label: AnalyticStateLabel, params: SystemParams) -> HybridEnergyRecord:
    if label.scheme != RWA:
        raise ValueError("rwa_energy requires an RWA label")
    if label.family == ZERO_POLARITON:
        e = -0.5 * params.omega_a + params.omega_m * label.M
    elif label.family == ISOLATED:
        r = jc_quantities(label.N, params).R_N
        e = (
            rwa_sector_constant(label.N, params)
            - (0.5 * params.g_om) ** 2 / params.omega_m
            - 0.5 * r
        )
    else:
        r = jc_quantities(label.N, params).R_N
        split = math.hypot(r - params.omega_m, params.g_om * math.sqrt(label.M + 1.0))
        center = (
            rwa_sector_constant(label.N, params)
            + params.omega_m * (label.M + 0.5)
            - (0.5 * params.g_om) ** 2 / params.omega_m
        )
        e = center + 0.5 * split if label.sign == "+" else center - 0.5 * split
    return HybridEnergyRecord(label, e, params)


def hybrid_energy(label: AnalyticStateLabel, params: SystemParams) -> HybridEnergyRecord:
    """Analytic energy for any family/scheme label."""
    if label.scheme == RWA:
        return rwa_energy(label, params)
    if label.family == ZERO_POLARITON:
        return energy_zero_polariton(label.M, params)
    if label.family == ISOLATED:
        return energy_isolated(label.N, params)
    return energy_doublet(label.N, label.M, label.sign, params)


# ---------------------------------------------------------------------------
# State embedding on atom (x) photon (x) phonon
# ---------------------------------------------------------------------------

def _promote(ket_ap: Ket, ket_b: Ket) -> Ket:
    return kron(ket_ap, ket_b)


def _displaced_phonon(nu: float, n: int, cutoffs: Cutoffs) -> Ket:
    d = displacement_op(nu, cutoffs.phonon, PHONON)
    return Ket(d.layout, d.matrix[:, n])


def _grwa_x_polaritons(N: int, params: SystemParams, cutoffs: Cutoffs) -> tuple[Ket, Ket]:
    """sigma_x-type combinations (|psi_+,N> pm |psi_-,N>)/sqrt(2)."""
    plus = grwa_state_embed(("+", N), params, cutoffs.photon)
    minus = grwa_state_embed(("-", N), params, cutoffs.photon)
    s = 1.0 / math.sqrt(2.0)
    x_plus = Ket(plus.layout, s * (plus.amplitudes + minus.amplitudes))
    x_minus = Ket(plus.layout, s * (plus.amplitudes - minus.amplitudes))
    return x_plus, x_minus


def hybrid_state_embed(
    label: AnalyticStateLabel,
    params: SystemParams,
    cutoffs: Cutoffs,
    norm_tol: float = 1e-6,
    sector_displacement: bool = True,
) -> Ket:
    """Embed an analytic hybrid eigenstate as a Ket on atom (x) photon (x) phonon.

    `sector_displacement=False` drops the common D(q_N/omega_m) phonon
    displacement; it is a local unitary on the phonon factor, so reduced
    density matrices and participation ratios are unchanged while the required
    phonon cutoff shrinks considerably.
    """
    if label.scheme == RWA:
        return _rwa_state_embed(label, params, cutoffs, sector_displacement)
    if label.family == ZERO_POLARITON:
        pol = grwa_state_embed("G", params, cutoffs.photon)
        q = q_ground(params) / params.omega_m if sector_displacement else 0.0
        vec = _promote(pol, _displaced_phonon(q, label.M, cutoffs))
        return _finish(vec, label, norm_tol)
    sp = sector_params(label.N, params)
    q = sp.q_N / params.omega_m if sector_displacement else 0.0
    g = sp.g_eff / params.omega_m
    x_plus, x_minus = _grwa_x_polaritons(label.N, params, cutoffs)
    s2 = 1.0 / math.sqrt(2.0)

    def ad_pair(m: int, sign: float) -> np.ndarray:
        # |Psi_ad_{pm,N,m}> = (|x_+>|m_+'> pm |x_->|m_-'>)/sqrt(2)
        up = _promote(x_plus, _displaced_phonon(q - g, m, cutoffs))
        dn = _promote(x_minus, _displaced_phonon(q + g, m, cutoffs))
        return s2 * (up.amplitudes + sign * dn.amplitudes)

    layout = _promote(x_plus, _displaced_phonon(0.0, 0, cutoffs)).layout
    if label.family == ISOLATED:
        amp = ad_pair(0, -1.0)
        return _finish(Ket(layout, amp), label, norm_tol)
    pq = polariton_phonon_quantities(label.N, label.M, params, sp)
    s, c = math.sin(pq.phi_NM / 2.0), math.cos(pq.phi_NM / 2.0)
    if label.sign == "+":
        amp = s * ad_pair(label.M, +1.0) + c * ad_pair(label.M + 1, -1.0)
    else:
        amp = c * ad_pair(label.M, +1.0) - s * ad_pair(label.M + 1, -1.0)
    return _finish(Ket(layout, amp), label, norm_tol)


def _rwa_state_embed(
    label: AnalyticStateLabel,
    params: SystemParams,
    cutoffs: Cutoffs,
    sector_displacement: bool,
) -> Ket:
    if label.family == ZERO_POLARITON:
        pol = jc_state_embed("G", params, cutoffs.photon)
        phon = _displaced_phonon(0.0, label.M, cutoffs)
        return _promote(pol, phon)
    q = (
        params.g_om * (label.N + 0.5) / params.omega_m
        if sector_displacement
        else 0.0
    )
    if label.family == ISOLATED:
        pol = jc_state_embed(("-", label.N), params, cutoffs.photon)
        return _promote(pol, _displaced_phonon(q, 0, cutoffs))
    theta = rwa_theta(label.N, label.M, params)
    s, c = math.sin(theta / 2.0), math.cos(theta / 2.0)
    up = _promote(
        jc_state_embed(("+", label.N), params, cutoffs.photon),
        _displaced_phonon(q, label.M, cutoffs),
    )
    dn = _promote(
        jc_state_embed(("-", label.N), params, cutoffs.photon),
        _displaced_phonon(q, label.M + 1, cutoffs),
    )
    if label.sign == "+":
        amp = s * up.amplitudes + c * dn.amplitudes
    else:
        amp = c * up.amplitudes - s * dn.amplitudes
    return Ket(up.layout, amp).normalized()


def _finish(vec: Ket, label: AnalyticStateLabel, norm_tol: float) -> Ket:
    amp = vec.amplitudes.reshape(vec.layout.dims)
    edge_ph = float(np.sum(np.abs(amp[:, -1, :]) ** 2))
    edge_m = float(np.sum(np.abs(amp[:, :, -1]) ** 2))
    dev = max(abs(vec.norm() - 1.0), edge_ph, edge_m)
    if dev > norm_tol:
        raise ValueError(
            f"embedded state {label} is truncation-damaged ({dev:.2e}); "
            "increase the cutoffs"
        )
    return vec.normalized()


def stark_term_magnitude(N: int, params: SystemParams) -> float:
    """|(2 q_N / omega_m) g_eff| of the off-diagonal term dropped from the
    displaced-frame block (diagnostic only; never enters energies)."""
    sp = sector_params(N, params)
    return abs(2.0 * sp.q_N / params.omega_m * sp.g_eff)


def grwa_labels(N_max: int, M_max: int) -> list[AnalyticStateLabel]:
    """All GRWA-GRWA labels with N <= N_max, M <= M_max."""
    labels = [AnalyticStateLabel(ZERO_POLARITON, GRWA, M=m) for m in range(M_max + 1)]
    labels += [AnalyticStateLabel(ISOLATED, GRWA, N=n) for n in range(N_max + 1)]
    labels += [
        AnalyticStateLabel(DOUBLET, GRWA, N=n, M=m, sign=s)
        for n in range(N_max + 1)
        for m in range(M_max + 1)
        for s in ("+", "-")
    ]
    return labels


def rwa_hybrid_spectrum(
    params: SystemParams, N_max: int, M_max: int, cutoffs: Cutoffs | None = None
) -> tuple[list[HybridEnergyRecord], dict[AnalyticStateLabel, Ket]]:
    """RWA-RWA baseline energies (and embedded states when cutoffs given)."""
    records = []
    kets: dict[AnalyticStateLabel, Ket] = {}
    labels = [
        AnalyticStateLabel(lab.family, RWA, N=lab.N, M=lab.M, sign=lab.sign)
        for lab in grwa_labels(N_max, M_max)
    ]
    for lab in labels:
        records.append(rwa_energy(lab, params))
        if cutoffs is not None:
            kets[lab] = hybrid_state_embed(lab, params, cutoffs)
    return records, kets
