"""Lattice model: a filled box of N sites joined to an empty reservoir through a defect.

Sites run from ``-N + 1`` (left wall) to ``N_b`` (far end of the reservoir).
The junction bond sits between site 0 (last system site) and site 1 (first
reservoir site).  Internally site ``i`` lives in row ``i + N - 1`` of every
matrix, so site 0 is row ``N - 1`` and site 1 is row ``N``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterError

__all__ = [
    "DefectKind",
    "ModelSpec",
    "build_hamiltonian",
    "reflection_probability",
    "transmission_probability",
    "reflection_coefficients",
    "page_time",
]


class DefectKind(str, enum.Enum):
    """Type of scatterer at the junction.

    The defect-free chain is ``HOPPING`` with ``g_c == g``.
    """

    CONFORMAL = "conformal"
    HOPPING = "hopping"
    DENSITY = "density"

    @classmethod
    def parse(cls, value) -> "DefectKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            choices = ", ".join(m.value for m in cls)
            raise ParameterError(f"unknown defect {value!r}; expected one of {choices}") from None


@dataclass(frozen=True)
class ModelSpec:
    """Geometry and couplings of the box + reservoir chain.

    Parameters
    ----------
    N : int
        Number of initially filled system sites (``-N+1 .. 0``).
    N_b : int
        Number of reservoir sites (``1 .. N_b``).
    g : float
        Bulk hopping amplitude.
    g_c : float
        Junction coupling; its meaning depends on ``defect``.
    defect : DefectKind
        Junction type.
    """

    N: int
    N_b: int
    g: float = 0.5
    g_c: float = 0.4
    defect: DefectKind = DefectKind.CONFORMAL

    def __post_init__(self):
        object.__setattr__(self, "defect", DefectKind.parse(self.defect))
        for name in ("N", "N_b"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < 1:
                raise ParameterError(f"{name} must be a positive integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        object.__setattr__(self, "g", float(self.g))
        object.__setattr__(self, "g_c", float(self.g_c))
        if not (math.isfinite(self.g) and self.g > 0):
            raise ParameterError(f"g must be positive, got {self.g!r}")
        if not (math.isfinite(self.g_c) and self.g_c >= 0):
            raise ParameterError(f"g_c must be non-negative, got {self.g_c!r}")
        if self.defect is DefectKind.CONFORMAL and not (0 < self.g_c <= self.g):
            raise ParameterError(
                f"conformal defect needs 0 < g_c <= g, got g_c={self.g_c!r}, g={self.g!r}"
            )

    @property
    def lam(self) -> float:
        """Coupling ratio ``g_c / g``."""
        return self.g_c / self.g

    @property
    def fermi_velocity(self) -> float:
        # maximal slope of the band -2 g cos k
        return 2.0 * self.g

    @property
    def dim(self) -> int:
        return self.N + self.N_b

    def row(self, site: int) -> int:
        """Matrix row of lattice site ``site``."""
        if not (-self.N + 1 <= site <= self.N_b):
            raise DomainError(f"site {site} outside [{-self.N + 1}, {self.N_b}]")
        return site + self.N - 1

    @property
    def sites(self) -> np.ndarray:
        return np.arange(-self.N + 1, self.N_b + 1)

    @property
    def junction_bond(self) -> float:
        """Magnitude of the hopping on the (0, 1) bond."""
        return self.g if self.defect is DefectKind.DENSITY else self.g_c

    def replace(self, **changes) -> "ModelSpec":
        fields = dict(N=self.N, N_b=self.N_b, g=self.g, g_c=self.g_c, defect=self.defect)
        fields.update(changes)
        return ModelSpec(**fields)


def build_hamiltonian(spec: ModelSpec) -> np.ndarray:
    """Single-particle hopping matrix of the finite chain, shape ``(N+N_b, N+N_b)``."""
    n = spec.dim
    h = np.zeros((n, n))
    off = -spec.g * np.ones(n - 1)
    h[np.arange(n - 1), np.arange(1, n)] = off
    h[np.arange(1, n), np.arange(n - 1)] = off

    r0, r1 = spec.row(0), spec.row(1)
    if spec.defect is DefectKind.CONFORMAL:
        onsite = math.sqrt(max(spec.g**2 - spec.g_c**2, 0.0))
        h[r0, r1] = h[r1, r0] = -spec.g_c
        h[r0, r0] = onsite
        h[r1, r1] = -onsite
    elif spec.defect is DefectKind.HOPPING:
        h[r0, r1] = h[r1, r0] = -spec.g_c
    else:
        h[r0, r0] = h[r1, r1] = spec.g_c
    return h


def reflection_coefficients(defect: DefectKind, lam: float, k) -> np.ndarray:
    """Vectorised reflection probability without domain checks.

    Used by the quadrature kernels, which only ever sample interior nodes.
    The density-defect expression is the one written for the
    ``lam = 2 cos k`` resonance; mirroring ``k -> pi - k`` gives the lattice
    result for the ``-2 g cos k`` band, and every observable here depends on
    ``k`` only through ``sin k`` so both conventions integrate identically.
    """
    defect = DefectKind.parse(defect)
    k = np.asarray(k, dtype=float)
    lam2 = lam * lam
    if defect is DefectKind.CONFORMAL:
        r = np.full_like(k, 1.0 - lam2)
    elif defect is DefectKind.HOPPING:
        r = (lam2 - 1.0) ** 2 / (lam2 * lam2 + 1.0 - 2.0 * lam2 * np.cos(2.0 * k))
    else:
        c = np.cos(k)
        num = lam2 * (lam - 2.0 * c) ** 2
        den = 2.0 + 2.0 * lam2 + lam2 * lam2 - 4.0 * lam2 * lam * c + 2.0 * (lam2 - 1.0) * np.cos(2.0 * k)
        r = num / den
    return np.clip(r, 0.0, 1.0)


def _check_k(k) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    if np.any(~np.isfinite(k)) or np.any(k <= 0.0) or np.any(k >= math.pi):
        raise DomainError("wavenumber must lie in the open interval (0, pi)")
    return k


def _check_lam(defect: DefectKind, lam: float) -> None:
    if not (math.isfinite(lam) and lam >= 0):
        raise ParameterError(f"lambda must be non-negative, got {lam!r}")
    if defect is DefectKind.CONFORMAL and not (0 < lam <= 1):
        raise ParameterError(f"conformal defect needs 0 < lambda <= 1, got {lam!r}")


def reflection_probability(defect, lam: float, k):
    """Reflection probability ``R_k`` of a plane wave hitting the junction.

    Accepts scalar or array ``k`` in ``(0, pi)``; returns the same shape.
    """
    defect = DefectKind.parse(defect)
    _check_lam(defect, lam)
    kk = _check_k(k)
    r = reflection_coefficients(defect, lam, kk)
    return float(r) if r.ndim == 0 else r


def transmission_probability(defect, lam: float, k):
    r = reflection_probability(defect, lam, k)
    return 1.0 - r


def page_time(spec: ModelSpec) -> float:
    """Round-trip time ``2N / v_F`` of the fastest quasiparticle."""
    return 2.0 * spec.N / spec.fermi_velocity
