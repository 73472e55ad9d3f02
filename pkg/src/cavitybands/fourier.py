"""Real 2pi-periodic potentials on the square lattice, stored as sparse Fourier maps.

A potential V(x) = sum_n V^(n) exp(i<n, x>) over n in Z^2 is real iff the
coefficients obey the Hermitian symmetry V^(-n) = conj(V^(n)).  The
constructor enforces that symmetry, so downstream code can rely on it.
"""

from __future__ import annotations

import cmath
import json
import math
from types import MappingProxyType

Freq = tuple[int, int]

_SYM_TOL = 1e-12


class FourierPotential:
    """Sparse coefficient map of a real periodic potential.

    Only one member of each +-n pair needs to be supplied; the partner is
    synthesized.  If both are given they must be conjugates.  Exact-zero
    coefficients are dropped.  Instances are immutable and safe to share
    across worker threads.
    """

    def __init__(self, coeffs: dict[Freq, complex], max_freq: int | None = None):
        full: dict[Freq, complex] = {}
        for n, v in coeffs.items():
            n = (int(n[0]), int(n[1]))
            v = complex(v)
            if n in full:
                # partner was synthesized earlier; the input must agree
                if abs(full[n] - v) > _SYM_TOL * max(1.0, abs(v)):
                    raise ValueError(f"coefficients at {n} and {(-n[0], -n[1])} are not conjugate")
                continue
            if v == 0:
                continue
            minus = (-n[0], -n[1])
            if minus == n:
                if abs(v.imag) > _SYM_TOL * max(1.0, abs(v)):
                    raise ValueError(f"coefficient at self-paired frequency {n} must be real")
                v = complex(v.real, 0.0)
                full[n] = v
            else:
                full[n] = v
                full[minus] = v.conjugate()
        reach = max((max(abs(n[0]), abs(n[1])) for n in full), default=0)
        if max_freq is None:
            max_freq = reach
        elif reach > max_freq:
            raise ValueError(f"stored frequency reach {reach} exceeds max_freq={max_freq}")
        self._coeffs = full
        self.max_freq = int(max_freq)

    @property
    def coeffs(self):
        return MappingProxyType(self._coeffs)

    def items(self):
        return self._coeffs.items()

    def __len__(self) -> int:
        return len(self._coeffs)

    def __getitem__(self, n: Freq) -> complex:
        return self._coeffs.get((int(n[0]), int(n[1])), 0.0 + 0.0j)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FourierPotential):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __repr__(self) -> str:
        return f"FourierPotential({len(self._coeffs)} coefficients, max_freq={self.max_freq})"

    def allclose(self, other: "FourierPotential", tol: float = 1e-14) -> bool:
        keys = set(self._coeffs) | set(other._coeffs)
        return all(abs(self[n] - other[n]) <= tol for n in keys)


def standard_potential(v0: float) -> FourierPotential:
    """The two-cosine potential V0*(cos x1 + cos x2): coefficient V0/2 at (+-1,0), (0,+-1)."""
    if v0 == 0:
        return FourierPotential({})
    h = 0.5 * v0
    return FourierPotential({(1, 0): h, (0, 1): h})


def heat_smooth(v: FourierPotential, b: float) -> FourierPotential:
    """Heat-flow smoothing at time B/4: multiply each coefficient by exp(-B|n|^2/4).

    Hermitian symmetry is preserved because the multiplier is real and even
    in n, so the result is again a real potential.
    """
    if b < 0:
        raise ValueError(f"heat smoothing requires B >= 0, got {b}")
    out = {n: c * math.exp(-0.25 * b * (n[0] * n[0] + n[1] * n[1])) for n, c in v.items()}
    return FourierPotential(out, v.max_freq)


def evaluate(v: FourierPotential, x: tuple[float, float]) -> float:
    """Evaluate the potential at a point; the imaginary residual must vanish."""
    s = 0.0 + 0.0j
    for n, c in v.items():
        s += c * cmath.exp(1j * (n[0] * x[0] + n[1] * x[1]))
    scale = max(1.0, sum(abs(c) for _, c in v.items()))
    if abs(s.imag) > 1e-12 * scale:
        raise ValueError(f"imaginary residual {s.imag:.3e} at x={x}; coefficients not Hermitian")
    return s.real


def to_records(v: FourierPotential) -> list[dict]:
    """One record per +-n pair, keyed by the lexicographically larger member."""
    recs = []
    for n, c in sorted(v.items()):
        if n >= (-n[0], -n[1]):
            recs.append({"n1": n[0], "n2": n[1], "re": c.real, "im": c.imag})
    return recs


def from_records(records: list[dict]) -> FourierPotential:
    coeffs: dict[Freq, complex] = {}
    for r in records:
        n = (int(r["n1"]), int(r["n2"]))
        if n in coeffs:
            raise ValueError(f"duplicate record for frequency {n}")
        coeffs[n] = complex(float(r.get("re", 0.0)), float(r.get("im", 0.0)))
    return FourierPotential(coeffs)


def to_json(v: FourierPotential) -> str:
    return json.dumps(to_records(v))


def from_json(text: str) -> FourierPotential:
    return from_records(json.loads(text))
