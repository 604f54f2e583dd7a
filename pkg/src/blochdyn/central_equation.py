"""Plane-wave band structure from the truncated coupled-component eigenproblem.

For crystal momentum k in the reduced zone and an optional gauge shift s
(the wavevector offset eA/ħ produced by a vector potential), the Hamiltonian
in the plane-wave basis exp(i(k + 2πl/a + s)x), l = -n..n, is

    H[l, l]   = (k + 2πl/a + s)² / 2 + V_0
    H[l, l']  = V_{l-l'}                       (l != l')

in internal units (ħ = m = e = 1). Eigenvalues are the band energies
ħω_{k,b}; eigenvector components a_l are the plane-wave weights of the
Bloch function.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePointError, InfiniteMassError
from .potential import FourierPotential

TWO_PI = 2.0 * np.pi

# finite-difference steps, in units of the zone width 2π/a
_DELTA_K_VELOCITY = 1e-5
_DELTA_K_MASS = 1e-4
_OVERLAP_MIN = 0.5
_CURVATURE_MIN = 1e-12


def reduce_to_zone(k, a: float = 1.0):
    """Map k into (-π/a, π/a]; ties at ±π/a land on +π/a."""
    k = np.asarray(k, dtype=np.float64)
    m = np.ceil(k * a / TWO_PI - 0.5)
    out = k - TWO_PI * m / a
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class CentralHamiltonian:
    k: float
    A_shift: float
    n: int
    pot: FourierPotential
    matrix: np.ndarray


@dataclass(frozen=True)
class BandSolution:
    """Eigendecomposition at one (k, A_shift): ascending energies, phase-fixed vectors."""

    k: float
    A_shift: float
    a: float
    n: int
    energies: np.ndarray
    vectors: np.ndarray

    @property
    def plane_wavevectors(self) -> np.ndarray:
        ls = np.arange(-self.n, self.n + 1)
        return self.k + TWO_PI * ls / self.a + self.A_shift


def build(k: float, A_shift: float, pot: FourierPotential, n: int) -> CentralHamiltonian:
    """Assemble the (2n+1)x(2n+1) Hermitian matrix at reduced k with gauge shift."""
    edge = np.pi / pot.a
    if abs(k) > edge * (1.0 + 1e-12):
        raise ValueError(f"k={k!r} outside the reduced zone [-π/a, π/a] for a={pot.a!r}")
    if n < 1:
        raise ValueError(f"truncation half-width must be >= 1, got {n}")
    if n < pot.cutoff:
        raise ValueError(
            f"truncation n={n} smaller than potential cutoff L={pot.cutoff}; "
            "harmonics would be silently dropped"
        )
    size = 2 * n + 1
    ls = np.arange(-n, n + 1)
    diag = (k + TWO_PI * ls / pot.a + A_shift) ** 2 / 2.0 + pot.coefficient(0).real
    dtype = np.float64 if pot.is_real else np.complex128
    H = np.zeros((size, size), dtype=dtype)
    H[np.diag_indices(size)] = diag
    for l, v in pot.items():
        if l == 0:
            continue
        # H[i, j] = V_{l_i - l_j}; row index i carries l_i = i - n
        val = v.real if dtype is np.float64 else v
        idx = np.arange(size - abs(l))
        if l > 0:
            H[idx + l, idx] = val
        else:
            H[idx, idx - l] = val
    return CentralHamiltonian(k=float(k), A_shift=float(A_shift), n=n, pot=pot, matrix=H)


def _phase_fix(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude component is real positive."""
    idx = np.argmax(np.abs(vectors), axis=0)
    lead = vectors[idx, np.arange(vectors.shape[1])]
    if np.iscomplexobj(vectors):
        phase = lead / np.abs(lead)
        return vectors * phase.conj()
    return vectors * np.sign(lead)


def solve(h: CentralHamiltonian) -> BandSolution:
    energies, vectors = np.linalg.eigh(h.matrix)
    vectors = _phase_fix(vectors)
    return BandSolution(
        k=h.k, A_shift=h.A_shift, a=h.pot.a, n=h.n, energies=energies, vectors=vectors
    )


def solve_at(k: float, A_shift: float, pot: FourierPotential, n: int) -> BandSolution:
    return solve(build(k, A_shift, pot, n))


def bloch_psi(sol: BandSolution, band: int, x):
    """ψ(x) = Σ_l a_l exp(i(k + 2πl/a + A_shift)x) for the given band."""
    if not 0 <= band < sol.energies.size:
        raise IndexError(f"band {band} out of range for truncation n={sol.n}")
    x = np.asarray(x, dtype=np.float64)
    kap = sol.plane_wavevectors
    val = np.exp(1j * np.multiply.outer(x, kap)) @ sol.vectors[:, band].astype(np.complex128)
    return val if val.ndim else complex(val)


def _match_band(center_vectors: np.ndarray, side_vectors: np.ndarray, band: int) -> int:
    """Index of the side eigenvector continuing the center band, by max |overlap|."""
    overlaps = np.abs(side_vectors.conj().T @ center_vectors[:, band])
    j = int(np.argmax(overlaps))
    if overlaps[j] < _OVERLAP_MIN:
        raise DegeneratePointError(
            f"band tracking ambiguous: best eigenvector overlap {overlaps[j]:.3f} < {_OVERLAP_MIN}"
        )
    return j


def _stencil_energies(k, band, pot, n, A_shift, delta):
    """Band energy at gauge shifts A_shift ± delta, overlap-tracked from the center.

    Shifting A instead of k probes the identical matrix (only k + A enters)
    while keeping one fixed plane-wave basis, so no zone rewrap or index
    roll is needed across the stencil.
    """
    center = solve_at(k, A_shift, pot, n)
    if not 0 <= band < center.energies.size:
        raise IndexError(f"band {band} out of range for truncation n={n}")
    out = []
    for s in (A_shift - delta, A_shift + delta):
        side = solve_at(k, s, pot, n)
        out.append(side.energies[_match_band(center.vectors, side.vectors, band)])
    return out[0], center.energies[band], out[1]


def group_velocity(k: float, band: int, pot: FourierPotential, n: int,
                   A_shift: float = 0.0) -> float:
    """dω/dk by central difference with step 1e-5·(2π/a), band tracked by overlap."""
    delta = _DELTA_K_VELOCITY * TWO_PI / pot.a
    e_minus, _, e_plus = _stencil_energies(k, band, pot, n, A_shift, delta)
    return float((e_plus - e_minus) / (2.0 * delta))


def hellmann_feynman_velocity(sol: BandSolution, band: int) -> float:
    """Exact band derivative Σ_l |a_l|² (k + 2πl/a + A_shift).

    Used where finite-difference roundoff (of order machine epsilon times
    the matrix norm over the step) would dominate, e.g. summing velocities
    over hundreds of k points.
    """
    w = np.abs(sol.vectors[:, band]) ** 2
    return float(w @ sol.plane_wavevectors)


def _mass_from_curvature(curvature: float) -> float:
    if abs(curvature) < _CURVATURE_MIN:
        raise InfiniteMassError(
            f"band curvature {curvature:.3e} below {_CURVATURE_MIN}; inflection point"
        )
    return 1.0 / curvature


def effective_mass(k: float, band: int, pot: FourierPotential, n: int,
                   A_shift: float = 0.0) -> float:
    """ħ²/(d²ε/dk²) by second central difference with step 1e-4·(2π/a).

    Negative near band tops; raises InfiniteMassError at inflection points.
    """
    delta = _DELTA_K_MASS * TWO_PI / pot.a
    e_minus, e_center, e_plus = _stencil_energies(k, band, pot, n, A_shift, delta)
    curvature = (e_plus - 2.0 * e_center + e_minus) / delta ** 2
    return _mass_from_curvature(float(curvature))


def band_sweep(pot: FourierPotential, n: int, k_points: int, n_bands: int,
               energy_eV: float, velocity_SI: float, threads: int = 1):
    """Rows (k, band, energy_eV, v_g_SI, m_star_ratio) over a uniform zone grid.

    energy_eV and velocity_SI are the SI values of one internal unit; the
    mass ratio m*/m_e is dimensionless. Rows are ordered by (k, band)
    regardless of thread count.
    """
    edge = np.pi / pot.a
    ks = np.linspace(-edge, edge, k_points)

    def one_k(k):
        sol = solve_at(k, 0.0, pot, n)
        rows = []
        for b in range(n_bands):
            vg = group_velocity(k, b, pot, n)
            try:
                ms = effective_mass(k, b, pot, n)
            except InfiniteMassError:
                ms = float("inf")
            rows.append((float(k), b, sol.energies[b] * energy_eV, vg * velocity_SI, ms))
        return rows

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as ex:
            per_k = list(ex.map(one_k, ks))
    else:
        per_k = [one_k(k) for k in ks]
    return [row for rows in per_k for row in rows]
