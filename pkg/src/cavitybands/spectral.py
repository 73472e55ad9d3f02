"""Dense Hermitian eigendecomposition and degeneracy clustering.

Every fiber matrix in the package is diagonalized through this module.  The
heavy lifting is delegated to LAPACK (via numpy/scipy), which meets the
residual and orthonormality contracts for the matrix sizes used here; the
test suite checks it against an independent Sturm-bisection oracle.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
import scipy.linalg

HERMITICITY_RTOL = 1e-12


class NonHermitianError(ValueError):
    """Input matrix deviates from Hermitian symmetry beyond tolerance."""


class EigenSystem(NamedTuple):
    """Ascending eigenvalues and the matching orthonormal eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray


def check_hermitian(h) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    scale = np.abs(h).max() if h.size else 0.0
    if scale > 0:
        dev = np.abs(h - h.conj().T).max()
        if dev > HERMITICITY_RTOL * scale:
            raise NonHermitianError(f"Hermiticity defect {dev:.3e} exceeds {HERMITICITY_RTOL:.0e} * max|H| = {HERMITICITY_RTOL * scale:.3e}")
    return h


def eigh(h) -> EigenSystem:
    """Full eigendecomposition; values ascending, vectors in matching columns.

    Raises NonHermitianError on bad input; LAPACK convergence failures
    propagate as numpy.linalg.LinAlgError.
    """
    h = check_hermitian(h)
    values, vectors = np.linalg.eigh(h)
    return EigenSystem(values, vectors)


def lowest_eigenvalues(h, count: int) -> np.ndarray:
    """The ascending lowest `count` eigenvalues (values only)."""
    h = check_hermitian(h)
    n = h.shape[0]
    if not 1 <= count <= n:
        raise ValueError(f"count must be in [1, {n}], got {count}")
    if count > n // 4:
        return np.linalg.eigvalsh(h)[:count]
    return scipy.linalg.eigh(h, eigvals_only=True, subset_by_index=(0, count - 1))


def lowest_eigensystem(h, count: int) -> EigenSystem:
    """Ascending lowest `count` eigenpairs."""
    h = check_hermitian(h)
    n = h.shape[0]
    if not 1 <= count <= n:
        raise ValueError(f"count must be in [1, {n}], got {count}")
    if count > n // 4:
        values, vectors = np.linalg.eigh(h)
        return EigenSystem(values[:count], vectors[:, :count])
    values, vectors = scipy.linalg.eigh(h, subset_by_index=(0, count - 1))
    return EigenSystem(values, vectors)


def cluster_degeneracies(values, tol: float) -> list[list[int]]:
    """Chained clustering of an ascending sequence.

    Indices i and i+1 land in the same group whenever values[i+1] - values[i]
    <= tol; chaining is transitive, so near-degenerate triples form a single
    group.  Returns 0-based index groups partitioning the sequence in order.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 1:
        raise ValueError("values must be a 1D array")
    if values.size and np.any(np.diff(values) < 0):
        raise ValueError("values must be ascending")
    groups: list[list[int]] = []
    current: list[int] = []
    for i in range(values.size):
        if current and values[i] - values[i - 1] > tol:
            groups.append(current)
            current = []
        current.append(i)
    if current:
        groups.append(current)
    return groups
