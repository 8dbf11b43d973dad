"""Quantum Rabi model approximations: displaced-oscillator overlaps, the
adiabatic basis, the GRWA block spectrum/states, and the Jaynes-Cummings
(RWA) baseline.

Displaced Fock states are |N_pm> = D(-+ nu)|N> with nu = g_ac / omega_c; the
overlap of two oppositely displaced states <M_-|N_+> equals <M|D(-2 nu)|N>
and has the closed Laguerre form implemented in `displaced_overlap`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .operators import (
    Ket,
    ModeCutoff,
    PHOTON,
    atom_kets,
    displacement_op,
    kron,
    mode_layout,
)
from .params import SystemParams

QrmLabel = str | tuple[str, int]  # "G" or (sign, N) with sign in {"+", "-"}


def genlaguerre_val(m: int, k: int, x: float) -> float:
    """Associated Laguerre polynomial L_m^k(x) by the stable upward recurrence
    in the degree m at fixed order k."""
    if m < 0 or k < 0:
        raise ValueError("Laguerre indices must be non-negative")
    prev = 1.0
    if m == 0:
        return prev
    cur = 1.0 + k - x
    for j in range(2, m + 1):
        prev, cur = cur, ((2 * j - 1 + k - x) * cur - (j - 1 + k) * prev) / j
    return cur


def displaced_overlap(M: int, N: int, nu: float) -> float:
    """<M_-|N_+> for displacement nu: e^{-2 nu^2} (2 nu)^{N-M} sqrt(M!/N!)
    L_M^{N-M}(4 nu^2) for M <= N, extended by the sign rule
    <M_-|N_+> = (-1)^{M-N} <N_-|M_+>."""
    if M < 0 or N < 0:
        raise ValueError("Fock indices must be non-negative")
    if M > N:
        return (-1) ** (M - N) * displaced_overlap(N, M, nu)
    if nu == 0.0:
        return 1.0 if M == N else 0.0
    x = 4.0 * nu * nu
    log_ratio = 0.5 * (math.lgamma(M + 1) - math.lgamma(N + 1))
    # (2 nu)^{N-M} merged into the log to stay finite at large N - M.
    log_pref = -x / 2.0 + (N - M) * math.log(2.0 * abs(nu)) + log_ratio
    sign = 1.0 if nu > 0 or (N - M) % 2 == 0 else -1.0
    return sign * math.exp(log_pref) * genlaguerre_val(M, N - M, x)


@dataclass(frozen=True)
class QrmGrwaQuantities:
    """Per-sector GRWA scalars for the bare quantum Rabi model."""

    N: int
    overlap_NN: float       # <N_-|N_+>
    overlap_N1N1: float     # <N+1_-|N+1_+>
    overlap_NN1: float      # <N_-|N+1_+>
    Omega_N: float          # 2 g_ac sqrt(N+1)
    Omega_NNp: float        # Omega_{N,N+1} = omega_a <N_-|N+1_+>
    Delta_N: float
    T_N: float
    alpha_N: float


@dataclass(frozen=True)
class JcQuantities:
    N: int
    beta_N: float
    R_N: float


@dataclass(frozen=True)
class QrmEnergyRecord:
    N: int
    E_N: float              # omega_a = 0 displaced-oscillator level
    E_ad_plus: float
    E_ad_minus: float
    E_grwa_G: float
    E_grwa_plus: float
    E_grwa_minus: float


def _mixing_angle(off_diag: float, detuning: float) -> float:
    """Angle a with sin a = off_diag / T, cos a = -detuning / T, so that
    (sin(a/2), cos(a/2)) is the upper eigenvector of the 2x2 block
    [[detuning/2, off_diag/2], [off_diag/2, -detuning/2]].

    tan a = -off_diag/detuning as in the defining relation; when both
    arguments vanish the doublet is degenerate and a = pi/2 by convention.
    """
    if off_diag == 0.0 and detuning == 0.0:
        return math.pi / 2.0
    return math.atan2(off_diag, -detuning)


def grwa_frequencies(N: int, params: SystemParams) -> QrmGrwaQuantities:
    """Overlaps, generalized Rabi frequency T_N, detuning Delta_N and mixing
    angle alpha_N of the GRWA sector N."""
    if N < 0:
        raise ValueError("N must be >= 0")
    nu = params.nu
    o_nn = displaced_overlap(N, N, nu)
    o_n1n1 = displaced_overlap(N + 1, N + 1, nu)
    o_nn1 = displaced_overlap(N, N + 1, nu)
    omega_nnp = params.omega_a * o_nn1
    delta = 0.5 * params.omega_a * (o_nn + o_n1n1) - params.omega_c
    t = math.hypot(omega_nnp, delta)
    alpha = _mixing_angle(omega_nnp, delta)
    return QrmGrwaQuantities(
        N=N,
        overlap_NN=o_nn,
        overlap_N1N1=o_n1n1,
        overlap_NN1=o_nn1,
        Omega_N=2.0 * params.g_ac * math.sqrt(N + 1.0),
        Omega_NNp=omega_nnp,
        Delta_N=delta,
        T_N=t,
        alpha_N=alpha,
    )


def adiabatic_spectrum(N: int, params: SystemParams) -> tuple[float, float]:
    """(E_ad_plus, E_ad_minus) for sector N."""
    if N < 0:
        raise ValueError("N must be >= 0")
    base = params.omega_c * (N - params.nu**2)
    split = 0.5 * params.omega_a * displaced_overlap(N, N, params.nu)
    return base + split, base - split


def grwa_ground_energy(params: SystemParams) -> float:
    """E_G = -g_ac^2/omega_c - Omega_{0,0}/2 (the 1x1 adiabatic block)."""
    return (
        -params.g_ac**2 / params.omega_c
        - 0.5 * params.omega_a * displaced_overlap(0, 0, params.nu)
    )


def grwa_qrm_spectrum(params: SystemParams, N_max: int) -> list[QrmEnergyRecord]:
    """GRWA energies E_G and E_{pm,N} for N = 0 .. N_max."""
    if N_max < 0:
        raise ValueError("N_max must be >= 0")
    e_g = grwa_ground_energy(params)
    records = []
    for N in range(N_max + 1):
        q = grwa_frequencies(N, params)
        e_ad_p, e_ad_m = adiabatic_spectrum(N, params)
        center = params.omega_c * (N + 0.5) - params.g_ac**2 / params.omega_c
        records.append(
            QrmEnergyRecord(
                N=N,
                E_N=params.omega_c * (N - params.nu**2),
                E_ad_plus=e_ad_p,
                E_ad_minus=e_ad_m,
                E_grwa_G=e_g,
                E_grwa_plus=center + 0.5 * q.T_N,
                E_grwa_minus=center - 0.5 * q.T_N,
            )
        )
    return records


def adiabatic_state(N: int, sign: str, params: SystemParams, cutoff: ModeCutoff) -> Ket:
    """|psi_ad_{pm,N}> = (|+x, N_+> pm |-x, N_->)/sqrt(2) on atom (x) photon."""
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    nu = params.nu
    d_minus = displacement_op(-nu, cutoff, PHOTON)  # columns are |N_+>
    d_plus = displacement_op(nu, cutoff, PHOTON)    # columns are |N_->
    atoms = atom_kets()
    plus = kron(atoms["+x"], Ket(d_minus.layout, d_minus.matrix[:, N]))
    minus = kron(atoms["-x"], Ket(d_plus.layout, d_plus.matrix[:, N]))
    s = 1.0 if sign == "+" else -1.0
    return Ket(plus.layout, (plus.amplitudes + s * minus.amplitudes) / math.sqrt(2.0))


def grwa_state_embed(
    label: QrmLabel,
    params: SystemParams,
    cutoff: ModeCutoff,
    norm_tol: float = 1e-6,
) -> Ket:
    """Embed a GRWA eigenstate of the bare QRM into the truncated
    atom (x) photon space. Renormalizes and raises when the truncated norm
    deviates from 1, or the weight on the top photon level exceeds,
    `norm_tol` (cutoff too small)."""
    if label == "G":
        vec = adiabatic_state(0, "-", params, cutoff)
    else:
        sign, N = label
        q = grwa_frequencies(N, params)
        ad_p = adiabatic_state(N, "+", params, cutoff)
        ad_m1 = adiabatic_state(N + 1, "-", params, cutoff)
        s, c = math.sin(q.alpha_N / 2.0), math.cos(q.alpha_N / 2.0)
        if sign == "+":
            amp = s * ad_p.amplitudes + c * ad_m1.amplitudes
        elif sign == "-":
            amp = c * ad_p.amplitudes - s * ad_m1.amplitudes
        else:
            raise ValueError(f"bad QRM label {label!r}")
        vec = Ket(ad_p.layout, amp)
    edge = float(np.sum(np.abs(vec.amplitudes.reshape(2, cutoff.n_max)[:, -1]) ** 2))
    dev = max(abs(vec.norm() - 1.0), edge)
    if dev > norm_tol:
        raise ValueError(
            f"embedded GRWA state {label!r} is truncation-damaged ({dev:.2e}); "
            "increase the photon cutoff"
        )
    return vec.normalized()


def jc_quantities(N: int, params: SystemParams) -> JcQuantities:
    """Mixing angle beta_N and generalized Rabi frequency R_N of the JC model."""
    if N < 0:
        raise ValueError("N must be >= 0")
    omega_n = 2.0 * params.g_ac * math.sqrt(N + 1.0)
    detuning = params.omega_a - params.omega_c
    if params.g_ac == 0.0 and detuning == 0.0:
        beta = math.pi / 2.0
    else:
        beta = _mixing_angle(omega_n, detuning)
    return JcQuantities(N=N, beta_N=beta, R_N=math.hypot(detuning, omega_n))


def jc_energies(N: int, params: SystemParams) -> tuple[float, float]:
    """JC doublet energies omega_c (N + 1/2) pm R_N / 2."""
    r = jc_quantities(N, params).R_N
    center = params.omega_c * (N + 0.5)
    return center + 0.5 * r, center - 0.5 * r


def jc_state_embed(label: QrmLabel, params: SystemParams, cutoff: ModeCutoff) -> Ket:
    """JC eigenstates on atom (x) photon: ground |‑z,0> or the dressed doublet
    f_pm(beta/2)|+z,N> pm f_mp(beta/2)|-z,N+1>."""
    n = cutoff.n_max
    lay = atom_kets()["+z"].layout.concat(mode_layout(PHOTON, cutoff))
    if label == "G":
        # |-z, 0>: atom index 1, photon index 0
        vec = np.zeros(lay.dim, dtype=complex)
        vec[1 * n + 0] = 1.0
        return Ket(lay, vec)
    sign, N = label
    if N + 1 >= n:
        raise ValueError("photon cutoff too small for the requested JC doublet")
    beta = jc_quantities(N, params).beta_N
    s, c = math.sin(beta / 2.0), math.cos(beta / 2.0)
    vec = np.zeros(lay.dim, dtype=complex)
    if sign == "+":
        vec[0 * n + N] = s
        vec[1 * n + (N + 1)] = c
    else:
        vec[0 * n + N] = c
        vec[1 * n + (N + 1)] = -s
    return Ket(lay, vec)


def jc_spectrum_and_states(
    params: SystemParams, N_max: int, cutoff: ModeCutoff
) -> tuple[list[dict], dict[QrmLabel, Ket]]:
    """JC energies and embedded states for the ground state and doublets
    N = 0 .. N_max."""
    records = [{"label": "G", "energy": -0.5 * params.omega_a}]
    kets: dict[QrmLabel, Ket] = {"G": jc_state_embed("G", params, cutoff)}
    for N in range(N_max + 1):
        e_plus, e_minus = jc_energies(N, params)
        records.append({"label": ("+", N), "energy": e_plus})
        records.append({"label": ("-", N), "energy": e_minus})
        kets[("+", N)] = jc_state_embed(("+", N), params, cutoff)
        kets[("-", N)] = jc_state_embed(("-", N), params, cutoff)
    return records, kets
