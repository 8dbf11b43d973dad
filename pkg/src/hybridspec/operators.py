"""Dense operators, kets and partial traces on truncated tensor-product spaces.

Factor ordering is fixed to atom (x) photon (x) phonon for the full hybrid
space; single- and two-factor layouts are used by the QRM-only machinery.
All values are complex double precision; every function here is pure.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

ATOM = "atom"
PHOTON = "photon"
PHONON = "phonon"


@dataclass(frozen=True)
class ModeCutoff:
    """Dimension of a truncated Fock space, states |0> ... |n_max - 1>."""

    n_max: int

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {self.n_max}")


@dataclass(frozen=True)
class SpaceLayout:
    """Ordered list of (role, dimension) factors of a tensor-product space."""

    factors: tuple[tuple[str, int], ...]

    def __post_init__(self):
        for role, dim in self.factors:
            if dim < 1:
                raise ValueError(f"factor {role} has dimension {dim}")
            if role == ATOM and dim != 2:
                raise ValueError("atom factor must have dimension 2")

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(d for _, d in self.factors)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    def index_of(self, role: str) -> int:
        for i, (r, _) in enumerate(self.factors):
            if r == role:
                return i
        raise KeyError(f"no factor with role {role!r}")

    def concat(self, other: "SpaceLayout") -> "SpaceLayout":
        return SpaceLayout(self.factors + other.factors)


def atom_layout() -> SpaceLayout:
    return SpaceLayout(((ATOM, 2),))


def mode_layout(role: str, cutoff: ModeCutoff) -> SpaceLayout:
    return SpaceLayout(((role, cutoff.n_max),))


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Operator:
    """Dense complex square matrix over a labeled tensor-product space."""

    layout: SpaceLayout
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = _freeze(self.matrix)
        if m.shape != (self.layout.dim, self.layout.dim):
            raise ValueError(
                f"matrix shape {m.shape} does not match layout dimension {self.layout.dim}"
            )
        object.__setattr__(self, "matrix", m)

    @property
    def dag(self) -> "Operator":
        return Operator(self.layout, self.matrix.conj().T)

    def __matmul__(self, other):
        if isinstance(other, Operator):
            _check_same_layout(self.layout, other.layout)
            return Operator(self.layout, self.matrix @ other.matrix)
        if isinstance(other, Ket):
            _check_same_layout(self.layout, other.layout)
            return Ket(self.layout, self.matrix @ other.amplitudes)
        return NotImplemented

    def __add__(self, other: "Operator") -> "Operator":
        _check_same_layout(self.layout, other.layout)
        return Operator(self.layout, self.matrix + other.matrix)

    def __sub__(self, other: "Operator") -> "Operator":
        _check_same_layout(self.layout, other.layout)
        return Operator(self.layout, self.matrix - other.matrix)

    def __mul__(self, scalar) -> "Operator":
        return Operator(self.layout, self.matrix * scalar)

    __rmul__ = __mul__

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))


@dataclass(frozen=True)
class Ket:
    """Dense complex state vector over a labeled tensor-product space."""

    layout: SpaceLayout
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = _freeze(self.amplitudes).reshape(-1)
        if v.shape != (self.layout.dim,):
            raise ValueError(
                f"amplitude length {v.shape[0]} does not match layout dimension {self.layout.dim}"
            )
        object.__setattr__(self, "amplitudes", v)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "Ket":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return Ket(self.layout, self.amplitudes / n)

    def dyad(self) -> Operator:
        v = self.amplitudes
        return Operator(self.layout, np.outer(v, v.conj()))


def _check_same_layout(a: SpaceLayout, b: SpaceLayout) -> None:
    if a.factors != b.factors:
        raise ValueError(f"layout mismatch: {a.factors} vs {b.factors}")


def inner(a: Ket, b: Ket) -> complex:
    """<a|b>."""
    _check_same_layout(a.layout, b.layout)
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def expectation(op: Operator, state: Ket) -> complex:
    _check_same_layout(op.layout, state.layout)
    return complex(np.vdot(state.amplitudes, op.matrix @ state.amplitudes))


def basis_ket(layout: SpaceLayout, index: int) -> Ket:
    v = np.zeros(layout.dim, dtype=complex)
    v[index] = 1.0
    return Ket(layout, v)


def identity(layout: SpaceLayout) -> Operator:
    return Operator(layout, np.eye(layout.dim, dtype=complex))


def annihilation_op(cutoff: ModeCutoff, role: str = PHOTON) -> Operator:
    """Truncated bosonic annihilation operator, <n-1|a|n> = sqrt(n)."""
    n = cutoff.n_max
    m = np.zeros((n, n), dtype=complex)
    ladder = np.sqrt(np.arange(1, n))
    m[np.arange(n - 1), np.arange(1, n)] = ladder
    return Operator(mode_layout(role, cutoff), m)


def number_op(cutoff: ModeCutoff, role: str = PHOTON) -> Operator:
    n = cutoff.n_max
    return Operator(mode_layout(role, cutoff), np.diag(np.arange(n)).astype(complex))


def pauli_ops() -> tuple[Operator, Operator, Operator]:
    """(sigma_x, sigma_y, sigma_z) on the atom factor; basis order (+z, -z)."""
    lay = atom_layout()
    sx = Operator(lay, np.array([[0, 1], [1, 0]], dtype=complex))
    sy = Operator(lay, np.array([[0, -1j], [1j, 0]], dtype=complex))
    sz = Operator(lay, np.array([[1, 0], [0, -1]], dtype=complex))
    return sx, sy, sz


def atom_kets() -> dict[str, Ket]:
    """Eigenkets |+z>, |-z>, |+x>, |-x> of the Pauli operators."""
    lay = atom_layout()
    up = basis_ket(lay, 0)
    dn = basis_ket(lay, 1)
    s = 1.0 / np.sqrt(2.0)
    return {
        "+z": up,
        "-z": dn,
        "+x": Ket(lay, s * (up.amplitudes + dn.amplitudes)),
        "-x": Ket(lay, s * (up.amplitudes - dn.amplitudes)),
    }


def displacement_safe_cutoff(nu: float, margin: int = 20) -> int:
    """Smallest cutoff trusted for D(nu): n_max >= 4 nu^2 + margin."""
    return int(np.ceil(4.0 * nu * nu)) + margin


def displacement_op(nu: float, cutoff: ModeCutoff, role: str = PHOTON) -> Operator:
    """D(nu) = exp(nu (a^dag - a)) on a truncated Fock space.

    The truncated generator is still anti-Hermitian, so the matrix is exactly
    unitary; truncation error shows up as the displaced low-n states leaking
    into the edge of the Fock ladder.  A warning is emitted when any of the
    leading n_max/6 columns has non-negligible amplitude on the last level.
    """
    a = annihilation_op(cutoff, role).matrix
    d = expm(nu * (a.conj().T - a))
    lead = max(1, cutoff.n_max // 6)
    leak = float(np.max(np.abs(d[-1, :lead])))
    if leak > 1e-4:
        warnings.warn(
            f"displacement_op(nu={nu}): displaced states reach the truncation "
            f"edge (amplitude {leak:.2e}); increase the cutoff "
            f"(safety rule: n_max >= {displacement_safe_cutoff(nu)})",
            stacklevel=2,
        )
    return Operator(mode_layout(role, cutoff), d)


def displaced_fock_ket(nu: float, n: int, cutoff: ModeCutoff, role: str = PHOTON) -> Ket:
    """D(nu)|n> as a truncated ket."""
    d = displacement_op(nu, cutoff, role)
    return Ket(d.layout, d.matrix[:, n])


def kron(a, b):
    """Kronecker product of Operators or Kets, concatenating layouts."""
    layout = a.layout.concat(b.layout)
    if isinstance(a, Operator) and isinstance(b, Operator):
        return Operator(layout, np.kron(a.matrix, b.matrix))
    if isinstance(a, Ket) and isinstance(b, Ket):
        return Ket(layout, np.kron(a.amplitudes, b.amplitudes))
    raise TypeError("kron requires two Operators or two Kets")


def kron_all(*parts):
    out = parts[0]
    for p in parts[1:]:
        out = kron(out, p)
    return out


def embed_factor_op(op: Operator, layout: SpaceLayout, position: int) -> Operator:
    """Promote a single-factor operator to `layout` via identities elsewhere."""
    if len(op.layout.factors) != 1 or op.layout.factors[0] != layout.factors[position]:
        raise ValueError("operator factor does not match the target layout slot")
    mats = [
        op.matrix if i == position else np.eye(d, dtype=complex)
        for i, (_, d) in enumerate(layout.factors)
    ]
    full = mats[0]
    for m in mats[1:]:
        full = np.kron(full, m)
    return Operator(layout, full)


def partial_trace(rho: Operator, keep: tuple[int, ...]) -> Operator:
    """Reduced density matrix on the kept factors (indices into the layout)."""
    n = len(rho.layout.factors)
    keep = tuple(keep)
    if any(k < 0 or k >= n for k in keep) or len(set(keep)) != len(keep):
        raise ValueError(f"invalid factor indices {keep} for {n} factors")
    m = rho.matrix
    if np.max(np.abs(m - m.conj().T)) > 1e-10 * max(1.0, np.max(np.abs(m))):
        raise ValueError("partial_trace requires a Hermitian input")
    if abs(np.trace(m) - 1.0) > 1e-10:
        raise ValueError("partial_trace requires trace 1 within 1e-10")
    dims = rho.layout.dims
    t = m.reshape(dims + dims)
    traced = [i for i in range(n) if i not in keep]
    # Trace out the dropped factors one at a time, highest index first so the
    # remaining axis numbers stay valid.
    for i in sorted(traced, reverse=True):
        t = np.trace(t, axis1=i, axis2=i + t.ndim // 2)
    # Reorder kept axes back to the requested order.
    kept_sorted = sorted(keep)
    perm = [kept_sorted.index(k) for k in keep]
    half = t.ndim // 2
    t = t.transpose(perm + [p + half for p in perm])
    new_layout = SpaceLayout(tuple(rho.layout.factors[k] for k in keep))
    d = new_layout.dim
    return Operator(new_layout, t.reshape(d, d))


def reduced_density_matrix(state: Ket, keep: tuple[int, ...]) -> Operator:
    """Partial trace of |state><state| without forming the full dyad."""
    n = len(state.layout.factors)
    keep = tuple(keep)
    if any(k < 0 or k >= n for k in keep) or len(set(keep)) != len(keep):
        raise ValueError(f"invalid factor indices {keep} for {n} factors")
    dims = state.layout.dims
    psi = state.amplitudes.reshape(dims)
    traced = tuple(i for i in range(n) if i not in keep)
    psi = psi.transpose(keep + traced)
    dk = int(np.prod([dims[k] for k in keep])) if keep else 1
    m = psi.reshape(dk, -1)
    rho = m @ m.conj().T
    new_layout = SpaceLayout(tuple(state.layout.factors[k] for k in keep))
    return Operator(new_layout, rho)
