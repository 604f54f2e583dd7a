"""Periodic crystal potential represented by its Fourier coefficients.

V(x) = Σ_l V_l exp(i 2πl x / a) with the Hermiticity constraint
V_{-l} = conj(V_l), which makes V real on the whole axis.
"""

from __future__ import annotations

import numpy as np

_IMAG_TOL = 1e-12


class FourierPotential:
    """Immutable periodic potential on lattice constant ``a``.

    Coefficients are given as a mapping {l: V_l} with integer l. Every
    stored l must come with its partner -l satisfying V_{-l} = conj(V_l);
    construction rejects anything else. V_0, if present, must be real.
    """

    __slots__ = ("a", "_coeffs", "_ls", "_vs")

    def __init__(self, a: float, coeffs: dict[int, complex]):
        if not a > 0.0:
            raise ValueError(f"lattice constant must be positive, got {a!r}")
        clean: dict[int, complex] = {}
        for l, v in coeffs.items():
            if l != int(l):
                raise ValueError(f"coefficient index must be an integer, got {l!r}")
            clean[int(l)] = complex(v)
        for l, v in clean.items():
            if l == 0:
                if abs(v.imag) > _IMAG_TOL:
                    raise ValueError(f"V_0 must be real, got {v!r}")
                continue
            if -l not in clean:
                raise ValueError(f"coefficient for l={-l} missing (Hermitian partner of l={l})")
            if abs(clean[-l] - v.conjugate()) > _IMAG_TOL * max(1.0, abs(v)):
                raise ValueError(
                    f"Hermiticity violated: V_{-l}={clean[-l]!r} != conj(V_{l})={v.conjugate()!r}"
                )
        self.a = float(a)
        self._coeffs = clean
        self._ls = np.array(sorted(clean), dtype=np.int64)
        self._vs = np.array([clean[l] for l in self._ls], dtype=np.complex128)

    @property
    def cutoff(self) -> int:
        """Largest stored |l| (0 for the empty potential)."""
        return int(np.max(np.abs(self._ls))) if self._ls.size else 0

    @property
    def is_real(self) -> bool:
        """True when all coefficients are real, i.e. V(-x) = V(x)."""
        return bool(np.all(np.abs(self._vs.imag) <= _IMAG_TOL))

    def coefficient(self, l: int) -> complex:
        return self._coeffs.get(int(l), 0.0 + 0.0j)

    def items(self):
        return self._coeffs.items()

    def evaluate(self, x):
        """Real potential value at x (scalar or array)."""
        x = np.asarray(x, dtype=np.float64)
        if self._ls.size == 0:
            out = np.zeros_like(x)
            return out if out.ndim else float(out)
        phases = np.exp(2j * np.pi * np.multiply.outer(x, self._ls) / self.a)
        val = phases @ self._vs
        assert np.max(np.abs(np.atleast_1d(val.imag))) < _IMAG_TOL
        return val.real if val.ndim else float(val.real)

    def derivative(self, x):
        """dV/dx at x, real by the same Hermiticity."""
        x = np.asarray(x, dtype=np.float64)
        if self._ls.size == 0:
            out = np.zeros_like(x)
            return out if out.ndim else float(out)
        ik = 2j * np.pi * self._ls / self.a
        dcoef = ik * self._vs
        phases = np.exp(2j * np.pi * np.multiply.outer(x, self._ls) / self.a)
        val = phases @ dcoef
        scale = max(1.0, float(np.sum(np.abs(dcoef))))
        assert np.max(np.abs(np.atleast_1d(val.imag))) < _IMAG_TOL * scale
        return val.real if val.ndim else float(val.real)

    def __repr__(self) -> str:
        return f"FourierPotential(a={self.a!r}, coeffs={self._coeffs!r})"


def single_cosine(a: float, amplitude: float) -> FourierPotential:
    """Canonical test potential: coeffs {+1: amplitude, -1: amplitude}.

    evaluate(x) = 2·amplitude·cos(2πx/a), so the zone-edge gap of the
    nearly-free band structure is 2·|amplitude|.
    """
    if amplitude == 0.0:
        return FourierPotential(a, {})
    return FourierPotential(a, {1: amplitude, -1: amplitude})


def random_symmetric(a: float, rng: np.random.Generator, lmax: int = 3,
                     lo: float = 0.3, hi: float = 1.5) -> FourierPotential:
    """Random real (mirror-symmetric) potential with |V_l| in [lo, hi]."""
    coeffs: dict[int, complex] = {}
    for l in range(1, lmax + 1):
        v = rng.uniform(lo, hi) * (1.0 if rng.random() < 0.5 else -1.0)
        coeffs[l] = v
        coeffs[-l] = v
    return FourierPotential(a, coeffs)
