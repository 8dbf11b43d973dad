"""Physical parameters and truncation cutoffs (hbar = 1 throughout)."""

from __future__ import annotations

from dataclasses import dataclass, replace

from .operators import ModeCutoff


@dataclass(frozen=True)
class SystemParams:
    """Frequencies and couplings of the hybrid atom-photon-phonon model.

    Conventionally expressed in units of the mechanical frequency omega_m.
    """

    omega_a: float
    omega_c: float
    omega_m: float
    g_ac: float = 0.0
    g_om: float = 0.0

    def __post_init__(self):
        if self.omega_a <= 0 or self.omega_c <= 0 or self.omega_m <= 0:
            raise ValueError("all frequencies must be strictly positive")
        if self.g_ac < 0 or self.g_om < 0:
            raise ValueError("couplings must be non-negative")

    @property
    def nu(self) -> float:
        """Photon displacement parameter g_ac / omega_c."""
        return self.g_ac / self.omega_c

    def with_(self, **kwargs) -> "SystemParams":
        return replace(self, **kwargs)


@dataclass(frozen=True)
class Cutoffs:
    photon: ModeCutoff
    phonon: ModeCutoff

    def __post_init__(self):
        if self.photon.n_max < 2 or self.phonon.n_max < 2:
            raise ValueError("photon and phonon cutoffs must be >= 2")

    @staticmethod
    def of(photon: int, phonon: int) -> "Cutoffs":
        return Cutoffs(ModeCutoff(photon), ModeCutoff(phonon))
