"""Bloch fiber matrices of the effective Hamiltonian on a truncated plane-wave basis.

In the plane-wave basis e_m(x) = (2 pi)^-1 exp(i<m, x>) the fiber at
quasi-momentum k acts as

    diagonal:   (m1 - k1)^2 + (m2 - k2)^2
    coupling:   e_m -> e_{m+n} with amplitude
                W^(n) * exp(-i B n1 n2 / 2) * exp(i B n1 (m2 + n2 - k2))

for every stored Fourier mode n of the smoothed potential W.  Couplings that
would leave the truncation window are dropped (standard spectral truncation;
convergence in N is tested, not assumed).

The optional gauge parameter theta conjugates the fiber by the diagonal
unitary exp(-i theta B (m1 - k1)(m2 - k2)); eigenvalues are unchanged and
theta = 1/2 gives the symmetric gauge used for curvature maps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fourier import FourierPotential, heat_smooth, standard_potential
from .spectral import lowest_eigenvalues


class PlaneWaveBasis:
    """Square truncation |m1|, |m2| <= N, ordered lexicographically by (m1, m2).

    The ordering is a bijection onto 0..dim-1 with the closed-form index
    (m1 + N) * (2N + 1) + (m2 + N).  The square window (rather than a disc)
    makes the B = 2*pi*l factorization into 1D problems exact at matched 1D
    truncation.
    """

    def __init__(self, n: int):
        n = int(n)
        if n < 0:
            raise ValueError(f"truncation N must be >= 0, got {n}")
        self.N = n
        self.side = 2 * n + 1
        self.dim = self.side * self.side
        grid = np.arange(-n, n + 1)
        self.m1 = np.repeat(grid, self.side)
        self.m2 = np.tile(grid, self.side)

    def index(self, m: tuple[int, int]) -> int:
        if not self.contains(m):
            raise KeyError(f"frequency {m} outside |m_i| <= {self.N}")
        return (m[0] + self.N) * self.side + (m[1] + self.N)

    def contains(self, m: tuple[int, int]) -> bool:
        return abs(m[0]) <= self.N and abs(m[1]) <= self.N

    def member(self, i: int) -> tuple[int, int]:
        return int(self.m1[i]), int(self.m2[i])

    def shift_pairs(self, p: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
        """Index arrays (dst, src) with member(dst) = member(src) + p, both in range."""
        p1, p2 = int(p[0]), int(p[1])
        n = self.N
        lo1, hi1 = max(-n, -n - p1), min(n, n - p1)
        lo2, hi2 = max(-n, -n - p2), min(n, n - p2)
        if lo1 > hi1 or lo2 > hi2:
            empty = np.zeros(0, dtype=int)
            return empty, empty
        a1 = np.arange(lo1, hi1 + 1)
        a2 = np.arange(lo2, hi2 + 1)
        src1 = np.repeat(a1, a2.size)
        src2 = np.tile(a2, a1.size)
        src = (src1 + n) * self.side + (src2 + n)
        dst = (src1 + p1 + n) * self.side + (src2 + p2 + n)
        return dst, src

    def __repr__(self) -> str:
        return f"PlaneWaveBasis(N={self.N}, dim={self.dim})"


@dataclass(frozen=True)
class EffectiveParams:
    """Smoothed potential W, field parameter B = 2*lambda^2, gauge theta in [0, 1]."""

    W: FourierPotential
    B: float
    theta: float = 0.0

    def __post_init__(self):
        if self.B < 0:
            raise ValueError(f"B must be >= 0, got {self.B}")
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError(f"theta must lie in [0, 1], got {self.theta}")

    @classmethod
    def from_v0(cls, v0: float, b: float, theta: float = 0.0) -> "EffectiveParams":
        """Two-cosine potential, heat-smoothed: effective coupling gamma = V0 exp(-B/4)."""
        return cls(heat_smooth(standard_potential(v0), b), b, theta)

    @property
    def gamma_scale(self) -> float:
        """Largest smoothed coefficient magnitude times 2 (equals |gamma| for the two-cosine W)."""
        return 2.0 * max((abs(c) for _, c in self.W.items()), default=0.0)


def gauge_phases(p: EffectiveParams, k: tuple[float, float], basis: PlaneWaveBasis) -> np.ndarray:
    """Diagonal of the theta-gauge unitary exp(-i theta B (m1-k1)(m2-k2))."""
    return np.exp(-1j * p.theta * p.B * (basis.m1 - k[0]) * (basis.m2 - k[1]))


def build_h_eff(p: EffectiveParams, k: tuple[float, float], basis: PlaneWaveBasis) -> np.ndarray:
    """Assemble the dense Hermitian fiber matrix of the effective Hamiltonian at k."""
    if basis.dim == 0:
        raise ValueError("empty plane-wave basis")
    k1, k2 = float(k[0]), float(k[1])
    b = p.B
    h = np.zeros((basis.dim, basis.dim), dtype=complex)
    d1 = basis.m1 - k1
    d2 = basis.m2 - k2
    h[np.arange(basis.dim), np.arange(basis.dim)] = d1 * d1 + d2 * d2
    for n, w in p.W.items():
        dst, src = basis.shift_pairs(n)
        if dst.size == 0:
            continue
        amp = w * np.exp(-0.5j * b * n[0] * n[1]) * np.exp(1j * b * n[0] * (basis.m2[src] + n[1] - k2))
        h[dst, src] += amp
    if p.theta != 0.0:
        d = gauge_phases(p, (k1, k2), basis)
        h *= d[:, None]
        h *= d.conj()[None, :]
    return h


def bands(p: EffectiveParams, k: tuple[float, float], basis: PlaneWaveBasis, count: int) -> np.ndarray:
    """First `count` eigenvalues E_1(k) <= ... <= E_count(k) of the fiber at k."""
    if count > basis.dim:
        raise ValueError(f"count={count} exceeds basis dimension {basis.dim}")
    return lowest_eigenvalues(build_h_eff(p, k, basis), count)


def sewing_shift(vec: np.ndarray, p: tuple[int, int], basis: PlaneWaveBasis, return_loss: bool = False):
    """Multiplication by exp(i<x, p>) realized as the Fourier index shift m -> m + p.

    Output coefficient at m equals the input coefficient at m - p; shifts
    leaving the truncation window are dropped.  With return_loss=True the
    discarded-norm fraction is reported alongside.  Accepts a single vector
    or a (dim, nb) frame of column vectors.
    """
    vec = np.asarray(vec)
    out = np.zeros_like(vec)
    dst, src = basis.shift_pairs(p)
    out[dst] = vec[src]
    if not return_loss:
        return out
    total = float(np.sum(np.abs(vec) ** 2))
    kept = float(np.sum(np.abs(out) ** 2))
    loss = 0.0 if total == 0.0 else max(0.0, (total - kept) / total)
    return out, loss
