"""Spectra and entanglement of a hybrid atom-photon-phonon model: exact
diagonalization, generalized-RWA analytics, and an RWA baseline."""

from .params import Cutoffs, SystemParams

__version__ = "0.1.0"

__all__ = ["Cutoffs", "SystemParams", "__version__"]
