"""Numerical laboratory for effective magnetic Bloch bands of a cavity-coupled 2D crystal.

Library layout:

- ``fourier``    sparse Fourier potentials and heat smoothing
- ``spectral``   dense Hermitian eigensolver front end and degeneracy clustering
- ``effective``  plane-wave Bloch fibers of the effective Hamiltonian
- ``oned``       1D Hill problem and the B = 2*pi*l factorization
- ``topology``   Chern numbers, Berry curvature maps, parent-state overlaps
- ``fullmodel``  plane-wave x Hermite assembly of the full Hamiltonian
- ``analysis``   gap scans, symmetry checks, Dirac-cone fits
- ``cli``        command-line experiment drivers (CSV/JSON + figures)
"""

__version__ = "0.1.0"

from .fourier import FourierPotential, evaluate, heat_smooth, standard_potential
from .spectral import EigenSystem, cluster_degeneracies, eigh
from .effective import EffectiveParams, PlaneWaveBasis, bands, build_h_eff, sewing_shift

__all__ = [
    "__version__",
    "FourierPotential",
    "standard_potential",
    "heat_smooth",
    "evaluate",
    "EigenSystem",
    "eigh",
    "cluster_degeneracies",
    "PlaneWaveBasis",
    "EffectiveParams",
    "build_h_eff",
    "bands",
    "sewing_shift",
]
