"""The 1D Hill problem (D_t - kappa)^2 + gamma*cos t and its consequences.

At B = 2*pi*l the 2D effective fiber separates into two copies of this 1D
operator, so its bands eps_j(kappa) determine the full spectrum there as
pairwise sums eps_m(k1) + eps_n(k2).  The free (gamma = 0) bands have closed
forms that drive the band-crossing certificates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .spectral import EigenSystem, eigh


@dataclass(frozen=True)
class HillParams:
    gamma: float
    kappa: float
    n1: int = 16

    def __post_init__(self):
        if self.n1 < 1:
            raise ValueError(f"1D truncation N1 must be >= 1, got {self.n1}")


def hill_matrix(gamma: float, kappa: float, n1: int) -> np.ndarray:
    """(2*N1+1)-dim Fourier matrix: diag (j - kappa)^2 with gamma/2 off-diagonals."""
    j = np.arange(-n1, n1 + 1)
    h = np.diag((j - kappa) ** 2).astype(complex)
    off = np.full(2 * n1, 0.5 * gamma)
    h += np.diag(off, 1) + np.diag(off, -1)
    return h


def one_d_bands(p: HillParams, count: int) -> EigenSystem:
    """Lowest `count` eigenpairs eps_1 <= eps_2 <= ... with unit-norm Fourier coefficient vectors."""
    dim = 2 * p.n1 + 1
    if not 1 <= count <= dim:
        raise ValueError(f"count must be in [1, {dim}], got {count}")
    values, vectors = eigh(hill_matrix(p.gamma, p.kappa, p.n1))
    return EigenSystem(values[:count], vectors[:, :count])


def one_d_values(gamma: float, kappa: float, count: int, n1: int = 16) -> np.ndarray:
    return one_d_bands(HillParams(gamma, kappa, n1), count).values


def sigma_offset(j: int) -> float:
    """sigma_j = 0 for odd j, 1/2 for even j (the kappa where the free gap d_j is widest)."""
    if j < 1:
        raise ValueError(f"band index must be >= 1, got {j}")
    return 0.0 if j % 2 else 0.5


def free_band_value(j: int, kappa: float) -> float:
    """Free band eps^0_j(kappa): (a-1+kappa)^2 for j = 2a-1, (a-kappa)^2 for j = 2a, on [0, 1/2].

    General kappa is folded into [0, 1/2] using evenness and 1-periodicity.
    """
    if j < 1:
        raise ValueError(f"band index must be >= 1, got {j}")
    kappa = abs(kappa) % 1.0
    if kappa > 0.5:
        kappa = 1.0 - kappa
    a = (j + 1) // 2
    if j % 2:
        return (a - 1 + kappa) ** 2
    return (a - kappa) ** 2


def free_gap(j: int, kappa: float) -> float:
    """Free gap d_j(kappa) = eps^0_{j+1} - eps^0_j on [0, 1/2]: j(1-2k) for odd j, 2jk for even j."""
    if j < 1:
        raise ValueError(f"band index must be >= 1, got {j}")
    if not 0.0 <= kappa <= 0.5:
        raise ValueError(f"kappa must lie in [0, 1/2], got {kappa}")
    if j % 2:
        return j * (1.0 - 2.0 * kappa)
    return 2.0 * j * kappa


def two_d_from_one_d(gamma: float, k: tuple[float, float], count: int, n1: int = 16) -> np.ndarray:
    """First `count` values of the sorted pairwise sums eps_m(k1) + eps_n(k2).

    All (2*N1+1)^2 sums of the truncated 1D spectra are formed, so at matched
    truncation the result reproduces the 2D square-window fiber spectrum at
    B = 2*pi*l exactly.
    """
    dim = 2 * n1 + 1
    if not 1 <= count <= dim * dim:
        raise ValueError(f"count must be in [1, {dim * dim}], got {count}")
    e1 = one_d_values(gamma, k[0], dim, n1)
    e2 = one_d_values(gamma, k[1], dim, n1)
    sums = np.sort((e1[:, None] + e2[None, :]).ravel())
    return sums[:count]


def pair_band_value(pair: tuple[int, int], k: tuple[float, float], gamma: float, n1: int = 16) -> float:
    """E_{m,n}(k) = eps_m(k1) + eps_n(k2) for 1-based 1D band indices (m, n)."""
    m, n = pair
    e1 = one_d_values(gamma, k[0], m, n1)[m - 1]
    e2 = one_d_values(gamma, k[1], n, n1)[n - 1]
    return float(e1 + e2)


class CrossingResult(NamedTuple):
    found: bool
    k: tuple[float, float] | None
    energy: float | None
    diff_start: float
    diff_end: float
    residual: float | None


def crossing_locate(
    pair_a: tuple[int, int],
    pair_b: tuple[int, int],
    gamma: float,
    k_path: tuple[tuple[float, float], tuple[float, float]],
    n1: int = 16,
    tol: float = 1e-9,
    max_iter: int = 200,
) -> CrossingResult:
    """Bisect E_a - E_b along the straight path between the two endpoints.

    The difference of sorted eigenvalues is continuous, so a sign change
    between the endpoints certifies a crossing; no sign change is reported as
    found=False rather than raised.
    """
    (k0, k1) = (np.asarray(k_path[0], dtype=float), np.asarray(k_path[1], dtype=float))

    def diff(t: float) -> float:
        k = tuple(k0 + t * (k1 - k0))
        return pair_band_value(pair_a, k, gamma, n1) - pair_band_value(pair_b, k, gamma, n1)

    fa, fb = diff(0.0), diff(1.0)
    if fa == 0.0:
        k = tuple(k0)
        return CrossingResult(True, k, pair_band_value(pair_a, k, gamma, n1), fa, fb, 0.0)
    if fb == 0.0:
        k = tuple(k1)
        return CrossingResult(True, k, pair_band_value(pair_a, k, gamma, n1), fa, fb, 0.0)
    if np.sign(fa) == np.sign(fb):
        return CrossingResult(False, None, None, fa, fb, None)
    lo, hi, flo = 0.0, 1.0, fa
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = diff(mid)
        if abs(fm) <= tol:
            k = tuple(k0 + mid * (k1 - k0))
            return CrossingResult(True, k, pair_band_value(pair_a, k, gamma, n1), fa, fb, abs(fm))
        if np.sign(fm) == np.sign(flo):
            lo = mid
        else:
            hi = mid
    k = tuple(k0 + 0.5 * (lo + hi) * (k1 - k0))
    fm = diff(0.5 * (lo + hi))
    return CrossingResult(abs(fm) <= tol, k, pair_band_value(pair_a, k, gamma, n1), fa, fb, abs(fm))


@dataclass
class CrossingCertificate:
    pair_a: tuple[int, int]
    pair_b: tuple[int, int]
    k_start: tuple[float, float]
    k_end: tuple[float, float]
    result: CrossingResult


def same_sum_endpoints(m: int, n: int) -> tuple[tuple[float, float], tuple[float, float]]:
    """Endpoints certifying (m, n) ~ (m-1, n+1): the free differences there are m-1 and -n."""
    s_m = sigma_offset(m - 1)
    s_n = sigma_offset(n)
    return (s_m, 0.5 - s_n), (0.5 - s_m, s_n)


def chain_step_endpoints(h: int, n: int) -> tuple[tuple[float, float], tuple[float, float]]:
    """Endpoints certifying (h, n) ~ (h+2, n-1) along k1 = 0."""
    s = sigma_offset(n - 1)
    return (0.0, s), (0.0, 0.5 - s)


def overlap_chain_check(gamma: float, max_sum: int, n1: int = 16, tol: float = 1e-9) -> list[CrossingCertificate]:
    """Finite crossing inventory behind the no-isolation theorem for m + n >= 4.

    Verifies (m, n) ~ (m-1, n+1) for all pairs with m >= 2 and m + n <= max_sum,
    and the cross-sum links (1, r-1) ~ (3, r-2) for 4 <= r <= max_sum.
    """
    certs: list[CrossingCertificate] = []
    for r in range(2, max_sum + 1):
        for m in range(2, r):
            n = r - m
            a, b = same_sum_endpoints(m, n)
            res = crossing_locate((m, n), (m - 1, n + 1), gamma, (a, b), n1, tol)
            certs.append(CrossingCertificate((m, n), (m - 1, n + 1), a, b, res))
    for r in range(4, max_sum + 1):
        s = sigma_offset(r - 2)
        a, b = (0.0, s), (0.0, 0.5 - s)
        res = crossing_locate((1, r - 1), (3, r - 2), gamma, (a, b), n1, tol)
        certs.append(CrossingCertificate((1, r - 1), (3, r - 2), a, b, res))
    return certs
