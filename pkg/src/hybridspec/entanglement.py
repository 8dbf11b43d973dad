"""Participation ratio xi = 1 / Tr(rho~^2) as an entanglement measure.

Two partitions appear.  For the atom-photon (QRM) eigenstates the photon is
traced out and xi measures atom-photon entanglement.  For the hybrid
eigenstates the phonon is traced out and xi measures polariton-phonon
entanglement; the reduced state lives in a two-dimensional polariton
subspace, so xi = 2/(1 + lambda^2) with a Bloch-like scalar lambda in both
cases.  xi = 1 for a product state, 2 for maximal entanglement.

A caution on the isolated-sector formula xi^{(N)}_G = 2/(1 + overlap^2): as
the phonon overlap tends to zero this gives xi -> 2 (maximal entanglement),
which is what the closed form and the partial-trace oracle agree on, even
though one might loosely describe the vanishing-overlap regime as
"separable".  The formula is authoritative here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hybrid import (
    DOUBLET,
    GRWA,
    ISOLATED,
    RWA,
    ZERO_POLARITON,
    AnalyticStateLabel,
    phonon_displaced_overlap,
    polariton_phonon_quantities,
    rwa_theta,
)
from .operators import Ket, reduced_density_matrix
from .params import SystemParams
from .qrm import grwa_frequencies, jc_quantities


@dataclass(frozen=True)
class EntanglementRecord:
    label: object  # AnalyticStateLabel or QRM label
    lambda_or_Lambda: float
    xi: float


def participation_ratio_numerical(state: Ket, keep: tuple[int, ...]) -> float:
    """xi = 1/Tr(rho~^2) with rho~ the reduction of |state> to `keep`."""
    if abs(state.norm() - 1.0) > 1e-10:
        raise ValueError("participation ratio requires a normalized state")
    rho = reduced_density_matrix(state, keep).matrix
    purity = float(np.real(np.trace(rho @ rho)))
    return 1.0 / purity


def _record(label, lam: float) -> EntanglementRecord:
    return EntanglementRecord(label, lam, 2.0 / (1.0 + lam * lam))


def _sign_str(sign) -> str:
    if sign in ("+", "-"):
        return sign
    return "+" if sign > 0 else "-"


def _branch_amplitudes(half_angle: float, sign: str) -> tuple[float, float]:
    """(coefficient on the lower-index basis state, on the higher-index one)."""
    if sign == "+":
        return math.sin(half_angle), math.cos(half_angle)
    return math.cos(half_angle), -math.sin(half_angle)


def xi_qrm_grwa(N: int, sign, params: SystemParams) -> EntanglementRecord:
    """Atom-photon xi of the GRWA QRM doublet state, sign = +/-1."""
    q = grwa_frequencies(N, params)
    sign = _sign_str(sign)
    f_a, f_b = _branch_amplitudes(0.5 * q.alpha_N, sign)
    lam = (
        f_a * f_a * q.overlap_NN
        - f_b * f_b * q.overlap_N1N1
        + 2.0 * f_a * f_b * q.overlap_NN1
    )
    return _record(("grwa", sign, N), lam)


def xi_qrm_rwa(N: int, params: SystemParams) -> EntanglementRecord:
    """Atom-photon xi of the JC polariton doublet; branch-independent:
    xi = 2/(1 + cos^2 beta_N)."""
    lam = math.cos(jc_quantities(N, params).beta_N)
    return _record(("rwa", N), lam)


def xi_hybrid_grwa(
    N: int, M: int, sign, params: SystemParams
) -> EntanglementRecord:
    """Polariton-phonon xi of the GRWA hybrid doublet state."""
    pq = polariton_phonon_quantities(N, M, params)
    sign = _sign_str(sign)
    f_a, f_b = _branch_amplitudes(0.5 * pq.phi_NM, sign)
    lam = (
        f_a * f_a * phonon_displaced_overlap(M, M, N, params)
        - f_b * f_b * phonon_displaced_overlap(M + 1, M + 1, N, params)
        + 2.0 * f_a * f_b * phonon_displaced_overlap(M, M + 1, N, params)
    )
    label = AnalyticStateLabel(DOUBLET, GRWA, N=N, M=M, sign=sign)
    return _record(label, lam)


def xi_hybrid_rwa(N: int, M: int, params: SystemParams) -> EntanglementRecord:
    """Polariton-phonon xi of the RWA hybrid doublet: 2/(1 + cos^2 theta)."""
    lam = math.cos(rwa_theta(N, M, params))
    label = AnalyticStateLabel(DOUBLET, RWA, N=N, M=M, sign="+")
    return _record(label, lam)


def xi_isolated(N: int, params: SystemParams) -> EntanglementRecord:
    """Polariton-phonon xi of the GRWA isolated ground state of sector N:
    xi = 2/(1 + overlap(0,0)^2).  The RWA counterpart is separable (xi = 1)."""
    lam = phonon_displaced_overlap(0, 0, N, params)
    label = AnalyticStateLabel(ISOLATED, GRWA, N=N)
    return _record(label, lam)


def participation_ratio_analytic(
    label: AnalyticStateLabel, params: SystemParams
) -> EntanglementRecord:
    """Dispatch on a hybrid-state label (polariton partition throughout)."""
    if label.family == ZERO_POLARITON:
        return EntanglementRecord(label, 1.0, 1.0)
    if label.family == ISOLATED:
        if label.scheme == RWA:
            return EntanglementRecord(label, 1.0, 1.0)
        return xi_isolated(label.N, params)
    if label.family == DOUBLET:
        if label.scheme == RWA:
            return xi_hybrid_rwa(label.N, label.M, params)
        return xi_hybrid_grwa(label.N, label.M, label.sign, params)
    raise ValueError(f"unknown family {label.family!r}")
