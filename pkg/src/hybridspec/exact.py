"""Exact numerical spectrum of the hybrid Hamiltonian on a truncated space:
construction, dense eigensolves, truncation-convergence search, the GRWA
conserved-number operator, and analytic-to-numerical state matching.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .operators import (
    ATOM,
    Ket,
    Operator,
    PHONON,
    PHOTON,
    SpaceLayout,
    annihilation_op,
    displacement_op,
    pauli_ops,
)
from .params import Cutoffs, SystemParams
from .qrm import adiabatic_state

DEFAULT_CUTOFF_CEILING = 256
# largest joint dimension the dense eigensolvers may attempt (memory bound)
MAX_DENSE_DIM = 14000


def hybrid_layout(cutoffs: Cutoffs) -> SpaceLayout:
    return SpaceLayout(
        (
            (ATOM, 2),
            (PHOTON, cutoffs.photon.n_max),
            (PHONON, cutoffs.phonon.n_max),
        )
    )


@dataclass(frozen=True)
class EigenSolution:
    energies: np.ndarray
    states: tuple[Ket, ...]
    params: SystemParams
    cutoffs: Cutoffs

    def __post_init__(self):
        e = np.asarray(self.energies, dtype=float)
        if np.any(np.diff(e) < 0):
            raise ValueError("energies must be sorted ascending")
        object.__setattr__(self, "energies", e)


@dataclass(frozen=True)
class StateAssignment:
    """Greedy max-overlap pairing of analytic labels with numerical indices."""

    assignments: dict  # label -> (numerical index, fidelity = |<.|.>|^2)

    def fidelity(self, label) -> float:
        return self.assignments[label][1]

    def index(self, label) -> int:
        return self.assignments[label][0]


def build_hybrid_hamiltonian(params: SystemParams, cutoffs: Cutoffs) -> Operator:
    """(omega_a/2) sigma_z + omega_c a^dag a + g_ac sigma_x (a^dag + a)
    + omega_m b^dag b - g_om a^dag a (b^dag + b), atom (x) photon (x) phonon."""
    layout = hybrid_layout(cutoffs)
    sx, _, sz = pauli_ops()
    a = annihilation_op(cutoffs.photon, PHOTON).matrix
    b = annihilation_op(cutoffs.phonon, PHONON).matrix
    n_ph = a.conj().T @ a
    x_ph = a.conj().T + a
    n_m = b.conj().T @ b
    x_m = b.conj().T + b
    i2 = np.eye(2)
    ip = np.eye(cutoffs.photon.n_max)
    im = np.eye(cutoffs.phonon.n_max)
    h = (
        0.5 * params.omega_a * np.kron(np.kron(sz.matrix.real, ip), im)
        + params.omega_c * np.kron(np.kron(i2, n_ph.real), im)
        + params.g_ac * np.kron(np.kron(sx.matrix.real, x_ph.real), im)
        + params.omega_m * np.kron(np.kron(i2, ip), n_m.real)
        - params.g_om * np.kron(np.kron(i2, n_ph.real), x_m.real)
    )
    return Operator(layout, h)


def eigendecompose(H: Operator, k: int, params=None, cutoffs=None) -> EigenSolution:
    """k lowest eigenpairs of a Hermitian operator (dense LAPACK solve)."""
    m = H.matrix
    scale = max(1.0, float(np.max(np.abs(m))))
    if np.max(np.abs(m - m.conj().T)) > 1e-10 * scale:
        raise ValueError("eigendecompose requires a Hermitian matrix")
    dim = m.shape[0]
    if not 1 <= k <= dim:
        raise ValueError(f"k must be in [1, {dim}]")
    if np.max(np.abs(m.imag)) == 0.0:
        vals, vecs = scipy.linalg.eigh(m.real, subset_by_index=(0, k - 1))
    else:
        vals, vecs = scipy.linalg.eigh(m, subset_by_index=(0, k - 1))
    h_norm = np.linalg.norm(m, ord=2) if dim <= 512 else float(np.linalg.norm(m, ord="fro"))
    resid = np.linalg.norm(m @ vecs - vecs * vals[None, :], axis=0)
    if np.any(resid > 1e-8 * max(h_norm, 1.0)):
        raise RuntimeError("eigensolver residual contract violated")
    states = tuple(Ket(H.layout, vecs[:, i]) for i in range(k))
    return EigenSolution(vals, states, params, cutoffs)


def _parity_signs(cutoffs: Cutoffs) -> np.ndarray:
    """Diagonal of Pi = sigma_z (x) (-1)^{a^dag a} (x) I, which commutes with
    the Hamiltonian and splits every eigensolve into two half-size blocks."""
    atom = np.array([1.0, -1.0])
    photon = (-1.0) ** np.arange(cutoffs.photon.n_max)
    phonon = np.ones(cutoffs.phonon.n_max)
    return np.kron(np.kron(atom, photon), phonon)


def hybrid_eigensolve(
    params: SystemParams, cutoffs: Cutoffs, k: int
) -> EigenSolution:
    """k lowest eigenpairs of the hybrid Hamiltonian via two parity blocks."""
    h = build_hybrid_hamiltonian(params, cutoffs).matrix.real
    signs = _parity_signs(cutoffs)
    vals_parts, vecs_parts = [], []
    for p in (1.0, -1.0):
        idx = np.where(signs == p)[0]
        kk = min(k, idx.size)
        vals, vecs = scipy.linalg.eigh(h[np.ix_(idx, idx)], subset_by_index=(0, kk - 1))
        full = np.zeros((h.shape[0], kk))
        full[idx, :] = vecs
        vals_parts.append(vals)
        vecs_parts.append(full)
    vals = np.concatenate(vals_parts)
    vecs = np.hstack(vecs_parts)
    order = np.argsort(vals, kind="stable")[:k]
    vals, vecs = vals[order], vecs[:, order]
    h_norm = float(np.linalg.norm(h, ord="fro"))
    resid = np.linalg.norm(h @ vecs - vecs * vals[None, :], axis=0)
    if np.any(resid > 1e-8 * max(h_norm, 1.0)):
        raise RuntimeError("eigensolver residual contract violated")
    layout = hybrid_layout(cutoffs)
    states = tuple(Ket(layout, vecs[:, i]) for i in range(k))
    return EigenSolution(vals, states, params, cutoffs)


def hybrid_eigensolve_window(
    params: SystemParams, cutoffs: Cutoffs, lo: float, hi: float
) -> EigenSolution:
    """All eigenpairs with energy in [lo, hi], via two parity blocks.

    Selecting by energy window instead of "lowest k" matters once g_om is
    large: the radiation-pressure coupling makes the spectrum unbounded below
    in photon number (polaron shift -n^2 g_om^2/omega_m), so collapsed
    multi-photon states can flood the bottom of the spectrum while the
    physically tracked low-photon levels sit far above them.
    """
    if not lo < hi:
        raise ValueError(f"empty energy window [{lo}, {hi}]")
    h = build_hybrid_hamiltonian(params, cutoffs).matrix.real
    signs = _parity_signs(cutoffs)
    vals_parts, vecs_parts = [], []
    for p in (1.0, -1.0):
        idx = np.where(signs == p)[0]
        vals, vecs = scipy.linalg.eigh(h[np.ix_(idx, idx)], subset_by_value=(lo, hi))
        full = np.zeros((h.shape[0], vals.size))
        full[idx, :] = vecs
        vals_parts.append(vals)
        vecs_parts.append(full)
    vals = np.concatenate(vals_parts)
    vecs = np.hstack(vecs_parts)
    if vals.size == 0:
        raise RuntimeError(f"no eigenvalues in window [{lo}, {hi}]")
    order = np.argsort(vals, kind="stable")
    vals, vecs = vals[order], vecs[:, order]
    h_norm = float(np.linalg.norm(h, ord="fro"))
    resid = np.linalg.norm(h @ vecs - vecs * vals[None, :], axis=0)
    if np.any(resid > 1e-8 * max(h_norm, 1.0)):
        raise RuntimeError("eigensolver residual contract violated")
    layout = hybrid_layout(cutoffs)
    states = tuple(Ket(layout, vecs[:, i]) for i in range(vals.size))
    return EigenSolution(vals, states, params, cutoffs)


def _lowest_energies(params: SystemParams, cutoffs: Cutoffs, k: int) -> np.ndarray:
    h = build_hybrid_hamiltonian(params, cutoffs).matrix.real
    signs = _parity_signs(cutoffs)
    parts = []
    for p in (1.0, -1.0):
        idx = np.where(signs == p)[0]
        kk = min(k, idx.size)
        parts.append(
            scipy.linalg.eigh(
                h[np.ix_(idx, idx)], subset_by_index=(0, kk - 1), eigvals_only=True
            )
        )
    return np.sort(np.concatenate(parts), kind="stable")[:k]


def _grown(c: Cutoffs, photon: bool = True, phonon: bool = True) -> Cutoffs:
    return Cutoffs.of(
        int(math.ceil(c.photon.n_max * 1.5)) if photon else c.photon.n_max,
        int(math.ceil(c.phonon.n_max * 1.5)) if phonon else c.phonon.n_max,
    )


def converge_cutoffs(
    params: SystemParams,
    k: int,
    tol: float,
    start: Cutoffs | None = None,
    ceiling: int = DEFAULT_CUTOFF_CEILING,
    energies_fn=None,
) -> tuple[Cutoffs, EigenSolution]:
    """Find small cutoffs whose k lowest energies move by less than `tol`
    when both cutoffs grow by 50%.  Each factor is converged separately
    (doubling up, then bisecting down), then the joint growth is verified.

    `energies_fn(cutoffs) -> array | None` replaces the convergence quantity
    (e.g. with matched tracked-level energies); returning None marks the
    cutoffs as too small.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")

    cache: dict[tuple[int, int], np.ndarray | None] = {}

    def energies(c: Cutoffs) -> np.ndarray | None:
        key = (c.photon.n_max, c.phonon.n_max)
        dim = 2 * key[0] * key[1]
        if dim > MAX_DENSE_DIM:
            raise RuntimeError(
                f"dense dimension guard: {dim} > {MAX_DENSE_DIM} at cutoffs {c}; "
                "the convergence target is not attainable in dense memory"
            )
        if key not in cache:
            cache[key] = (
                _lowest_energies(params, c, k) if energies_fn is None else energies_fn(c)
            )
        return cache[key]

    def drift(a: Cutoffs, b: Cutoffs) -> float:
        ea, eb = energies(a), energies(b)
        if ea is None or eb is None or ea.shape != eb.shape:
            return math.inf
        return float(np.max(np.abs(ea - eb)))

    def big_enough(c: Cutoffs) -> bool:
        return 2 * c.photon.n_max * c.phonon.n_max >= k

    # raised after each failed joint verification so the per-axis bisection
    # cannot fall back to the same marginal point and cycle
    floor = {"photon": 2, "phonon": 2}

    def converge_axis(c: Cutoffs, axis: str) -> Cutoffs:
        def with_n(n: int) -> Cutoffs:
            return (
                Cutoffs.of(n, c.phonon.n_max)
                if axis == "photon"
                else Cutoffs.of(c.photon.n_max, n)
            )

        def stable(n: int) -> bool:
            trial = with_n(n)
            return big_enough(trial) and drift(
                trial, _grown(trial, photon=axis == "photon", phonon=axis == "phonon")
            ) < tol

        n = getattr(c, axis).n_max
        while not stable(n):
            if n >= ceiling:
                raise RuntimeError(
                    f"{axis} cutoff ceiling {ceiling} reached without convergence"
                )
            n = min(2 * n, ceiling)
        lo, hi = floor[axis], n
        while lo < hi:
            mid = (lo + hi) // 2
            if stable(mid):
                hi = mid
            else:
                lo = mid + 1
        return with_n(hi)

    c = start or Cutoffs.of(8, 8)
    if not big_enough(c):
        side = int(math.ceil(math.sqrt(k / 2))) + 2
        c = Cutoffs.of(max(c.photon.n_max, side), max(c.phonon.n_max, side))
    for _ in range(8):
        c = converge_axis(c, "photon")
        c = converge_axis(c, "phonon")
        if drift(c, _grown(c)) < tol:
            return c, hybrid_eigensolve(params, c, k)
        if c.photon.n_max >= ceiling or c.phonon.n_max >= ceiling:
            raise RuntimeError(
                f"cutoff ceiling {ceiling} reached without joint convergence at {c}"
            )
        c = Cutoffs.of(
            min(int(math.ceil(1.25 * c.photon.n_max)), ceiling),
            min(int(math.ceil(1.25 * c.phonon.n_max)), ceiling),
        )
        floor["photon"] = max(floor["photon"], c.photon.n_max)
        floor["phonon"] = max(floor["phonon"], c.phonon.n_max)
    raise RuntimeError("joint cutoff convergence did not settle")


def parity_op(cutoffs: Cutoffs) -> Operator:
    """Pi = sigma_z exp(i pi a^dag a) (x) phonon identity."""
    _, _, sz = pauli_ops()
    signs = np.diag((-1.0) ** np.arange(cutoffs.photon.n_max))
    m = np.kron(
        np.kron(sz.matrix, signs), np.eye(cutoffs.phonon.n_max)
    )
    return Operator(hybrid_layout(cutoffs), m)


def conserved_number_grwa(params: SystemParams, cutoffs: Cutoffs) -> Operator:
    """GRWA conserved polariton number, tensored with the phonon identity.

    N = (1/2)(I + sigma_x) D^dag(nu) n D(nu) + (1/2)(I - sigma_x) D(nu) n D^dag(nu)
        + sum_N |psi_ad_{+,N}><psi_ad_{+,N}|, the projector sum truncated at
    photon cutoff - 1.
    """
    nu = params.nu
    sx, _, _ = pauli_ops()
    i2 = np.eye(2)
    d = displacement_op(nu, cutoffs.photon, PHOTON).matrix
    n_ph = np.diag(np.arange(cutoffs.photon.n_max)).astype(complex)
    n_plus = d.conj().T @ n_ph @ d
    n_minus = d @ n_ph @ d.conj().T
    proj_plus = 0.5 * (i2 + sx.matrix)
    proj_minus = 0.5 * (i2 - sx.matrix)
    m = np.kron(proj_plus, n_plus) + np.kron(proj_minus, n_minus)
    for n in range(cutoffs.photon.n_max - 1):
        psi = adiabatic_state(n, "+", params, cutoffs.photon).amplitudes
        m = m + np.outer(psi, psi.conj())
    m = 0.5 * (m + m.conj().T)
    full = np.kron(m, np.eye(cutoffs.phonon.n_max))
    return Operator(hybrid_layout(cutoffs), full)


def _cluster_members(energies: np.ndarray, i: int, tol: float) -> np.ndarray:
    """Indices of levels connected to level i through consecutive gaps < tol."""
    lo = i
    while lo > 0 and energies[lo] - energies[lo - 1] < tol:
        lo -= 1
    hi = i
    while hi + 1 < len(energies) and energies[hi + 1] - energies[hi] < tol:
        hi += 1
    return np.arange(lo, hi + 1)


def match_states(
    solution: EigenSolution,
    analytic: dict,
    degeneracy_tol: float | dict | None = None,
) -> StateAssignment:
    """Greedy maximum-|overlap|^2 assignment of labeled analytic kets to
    numerical eigenvectors; ties broken by lower numerical index, then label
    order. Each numerical index is used at most once.

    Recorded fidelity is the squared projection onto the *degenerate cluster*
    of the assigned level (consecutive gaps below `degeneracy_tol`, a float
    or a per-label mapping): within a quasi-degenerate group the individual
    numerical eigenvectors are an arbitrary rotation, but the subspace is
    well defined.
    """
    if not analytic or not solution.states:
        raise ValueError("match_states requires non-empty inputs")
    energies = solution.energies
    base_tol = 1e-10 * max(1.0, float(np.max(np.abs(energies))))

    def tol_for(label) -> float:
        if degeneracy_tol is None:
            return base_tol
        if isinstance(degeneracy_tol, dict):
            return max(base_tol, degeneracy_tol.get(label, base_tol))
        return max(base_tol, float(degeneracy_tol))

    labels = list(analytic.keys())
    vecs = np.column_stack([s.amplitudes for s in solution.states])
    amat = np.column_stack([analytic[lab].amplitudes for lab in labels])
    overlaps = np.abs(vecs.conj().T @ amat) ** 2  # [num index, label]

    pairs = [
        (-overlaps[i, j], i, j)
        for i in range(overlaps.shape[0])
        for j in range(overlaps.shape[1])
    ]
    pairs.sort()
    used_idx: set[int] = set()
    used_lab: set[int] = set()
    out = {}
    for _, i, j in pairs:
        if i in used_idx or j in used_lab:
            continue
        members = _cluster_members(energies, i, tol_for(labels[j]))
        out[labels[j]] = (i, float(np.sum(overlaps[members, j])))
        used_idx.add(i)
        used_lab.add(j)
        if len(out) == len(labels):
            break
    return StateAssignment(out)
