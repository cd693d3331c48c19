"""Exact free-fermion evolution of the filled box.

The correlation matrix ``C_ij = <c_i^dag c_j>`` of the initial product state
has rank N, so ``C(t) = A(t) A(t)^dag`` with ``A(t) = exp(i h t) A(0)`` and
``A(0)`` the identity columns of the system sites.  Only the N occupied
orbitals are propagated; the full ``(N+N_b)^2`` correlation matrix is never
formed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import NumericError, ValidityWindowWarning
from .model import ModelSpec, build_hamiltonian

__all__ = [
    "SpectralDecomposition",
    "OccupiedOrbitalFrame",
    "SubsystemSpectrum",
    "ExactPropagator",
    "diagonalize",
    "evolve_occupied_orbitals",
    "site_density",
    "junction_current",
    "subsystem_spectrum",
    "vonneumann_entropy",
    "number_cumulant2",
    "entropy_from_cumulant",
    "mode_entropy",
]

SNAP_EPS = 1e-12


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.T


@dataclass(frozen=True)
class OccupiedOrbitalFrame:
    """Orbitals of the initially filled sites at time ``t``.

    ``orbitals[:, j]`` is the evolved single-particle state that started on
    system site ``j - N + 1``.  Rows follow the model's site-to-row map.
    """

    t: float
    orbitals: np.ndarray
    N: int

    @property
    def correlation_rows(self) -> np.ndarray:
        return self.orbitals

    def correlation(self, i_row: int, j_row: int) -> complex:
        """Single element ``<c_i^dag c_j>`` by row index."""
        return complex(self.orbitals[i_row] @ self.orbitals[j_row].conj())


@dataclass(frozen=True)
class SubsystemSpectrum:
    """Eigenvalues of the system-restricted correlation matrix, descending."""

    eigenvalues: np.ndarray
    raw_min: float = field(default=0.0)
    raw_max: float = field(default=1.0)

    @property
    def particle_number(self) -> float:
        return float(self.eigenvalues.sum())


def diagonalize(h: np.ndarray) -> SpectralDecomposition:
    """Eigendecomposition of a real symmetric hopping matrix."""
    h = np.asarray(h, dtype=float)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise NumericError(f"expected a square matrix, got shape {h.shape}")
    try:
        w, u = scipy.linalg.eigh(h, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericError(
            f"eigensolver failed on {h.shape[0]}x{h.shape[0]} matrix "
            f"(max|h|={np.nanmax(np.abs(h)):.3g}, asym={np.nanmax(np.abs(h - h.T)):.3g}): {exc}"
        ) from exc
    return SpectralDecomposition(w, u)


def _system_block(spec: ModelSpec, decomp: SpectralDecomposition) -> np.ndarray:
    # U^T A(0): the system rows of U, transposed
    return decomp.eigenvectors[: spec.N, :].T


def evolve_occupied_orbitals(
    spec: ModelSpec, decomp: SpectralDecomposition, t: float
) -> OccupiedOrbitalFrame:
    """Full ``A(t) = U exp(i Lambda t) U^T A(0)``, shape ``(N+N_b, N)``."""
    if t < 0:
        raise ValueError(f"time must be non-negative, got {t}")
    u = decomp.eigenvectors
    phase = np.exp(1j * decomp.eigenvalues * t)
    a = u @ (phase[:, None] * _system_block(spec, decomp))
    return OccupiedOrbitalFrame(float(t), a, spec.N)


def site_density(frame: OccupiedOrbitalFrame) -> np.ndarray:
    """Occupation of every site, ordered from the left wall to the far end."""
    a = frame.orbitals
    return np.einsum("ij,ij->i", a.real, a.real) + np.einsum("ij,ij->i", a.imag, a.imag)


def junction_current(frame: OccupiedOrbitalFrame, spec: ModelSpec) -> float:
    """Particle current from site 0 to site 1, ``2 b Im <c_0^dag c_1>``.

    ``b`` is the actual bond magnitude in ``h``: ``g_c`` for the conformal
    and hopping defects, ``g`` for the density defect.
    """
    c01 = frame.correlation(spec.row(0), spec.row(1))
    return 2.0 * spec.junction_bond * c01.imag


def _gram_spectrum(a_sys: np.ndarray) -> SubsystemSpectrum:
    gram = a_sys @ a_sys.conj().T
    try:
        m = scipy.linalg.eigvalsh(gram)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericError(f"subsystem eigensolver failed: {exc}") from exc
    raw_min, raw_max = float(m.min()), float(m.max())
    m = np.clip(m, 0.0, 1.0)
    m[m < SNAP_EPS] = 0.0
    m[m > 1.0 - SNAP_EPS] = 1.0
    return SubsystemSpectrum(m[::-1].copy(), raw_min, raw_max)


def subsystem_spectrum(frame: OccupiedOrbitalFrame) -> SubsystemSpectrum:
    """Spectrum of ``C_s`` from the N x N Gram matrix of the system rows."""
    return _gram_spectrum(frame.orbitals[: frame.N])


def _binary_entropy(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    out = np.zeros_like(m)
    inner = (m > 0.0) & (m < 1.0)
    p = m[inner]
    out[inner] = -(p * np.log(p) + (1.0 - p) * np.log1p(-p))
    return out


def mode_entropy(m) -> np.ndarray:
    """Binary entropy ``-m log m - (1-m) log(1-m)`` per mode, with 0 log 0 = 0.

    Values within ``1e-12`` of 0 or 1 are snapped onto the boundary first.
    """
    m = np.clip(np.asarray(m, dtype=float), 0.0, 1.0)
    m = np.where(m < SNAP_EPS, 0.0, np.where(m > 1.0 - SNAP_EPS, 1.0, m))
    return _binary_entropy(m)


def vonneumann_entropy(spectrum: SubsystemSpectrum) -> float:
    return float(mode_entropy(spectrum.eigenvalues).sum())


def number_cumulant2(spectrum: SubsystemSpectrum) -> float:
    m = spectrum.eigenvalues
    return float(np.sum(m * (1.0 - m)))


def entropy_from_cumulant(kappa2: float) -> float:
    """Leading (second-cumulant) term of the entropy/charge-statistics series."""
    if kappa2 < 0:
        raise ValueError(f"kappa2 must be non-negative, got {kappa2}")
    # alpha_2 / 2! = (2 pi)^2 |B_2| / 2 with B_2 = 1/6
    return math.pi**2 / 3.0 * kappa2


class ExactPropagator:
    """Cached spectral propagator for time series on one model.

    Only the system rows and the first reservoir row of ``A(t)`` are needed
    for the entropy, cumulant, particle number and current, so a time step
    costs ``O((N+1) (N+N_b) N)``.
    """

    def __init__(self, spec: ModelSpec, decomp: SpectralDecomposition | None = None):
        self.spec = spec
        self.decomp = decomp if decomp is not None else diagonalize(build_hamiltonian(spec))
        u = self.decomp.eigenvectors
        self._block = _system_block(spec, self.decomp)
        self._rows = u[: spec.N + 1, :]

    def validity_limit(self) -> float:
        """Time after which the far reservoir wall contaminates the dynamics."""
        return 0.9 * self.spec.N_b / self.spec.fermi_velocity

    def frame(self, t: float) -> OccupiedOrbitalFrame:
        return evolve_occupied_orbitals(self.spec, self.decomp, t)

    def observables(self, t: float) -> dict[str, float]:
        """Current, entropy, second cumulant and system particle number at ``t``."""
        if t < 0:
            raise ValueError(f"time must be non-negative, got {t}")
        phase = np.exp(1j * self.decomp.eigenvalues * t)
        a = self._rows @ (phase[:, None] * self._block)
        spec = self.spec
        a_sys = a[: spec.N]
        c01 = a[spec.N - 1] @ a[spec.N].conj()
        spectrum = _gram_spectrum(a_sys)
        return {
            "I": 2.0 * spec.junction_bond * float(c01.imag),
            "S": vonneumann_entropy(spectrum),
            "kappa2": number_cumulant2(spectrum),
            "N_sys": float(np.sum(np.abs(a_sys) ** 2)),
        }

    def series(self, times, warn: bool = True) -> dict[str, np.ndarray]:
        times = np.asarray(times, dtype=float)
        if warn and times.size and times.max() > self.validity_limit():
            warnings.warn(
                f"t={times.max():g} exceeds 0.9*N_b/v_F={self.validity_limit():g}; "
                "reflections from the reservoir end are included",
                ValidityWindowWarning,
                stacklevel=2,
            )
        rows = [self.observables(float(t)) for t in times]
        keys = ("I", "S", "kappa2", "N_sys")
        return {key: np.array([r[key] for r in rows]) for key in keys}

    def density_profile(self, t: float) -> np.ndarray:
        return site_density(self.frame(t))
