"""Ballistic (generalized) hydrodynamics of the leaking box.

Quasiparticles with wavenumber ``k`` move at ``v_k = 2 g sin k``.  They are
reflected by the hard wall at ``x = -N`` and transmitted / reflected at the
junction ``x = 0`` with probabilities ``T_k`` / ``R_k``.  Unfolding the wall
turns the initial box into a right-moving slab on ``(-2N, 0]``, and the
phase-space density becomes a sum of shifted images weighted by powers of
``R_k``.

Everything below works with ``k`` folded onto ``(0, pi)``: for each speed
there is a right mover (``+k``) and a left mover (``-k``), and ``R_k`` is
even in ``k``.  At fixed ``k`` the occupation is piecewise constant in
``x``, so position integrals are done exactly and only the ``k`` integral
needs quadrature.  Its kinks sit where the travelled distance
``D = v_F t sin k`` crosses a multiple of ``N``.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ParameterError, QuadratureWarning
from .exact import mode_entropy
from .model import DefectKind, ModelSpec, page_time, reflection_coefficients
from .quadrature import QuadResult, clean_breakpoints, gauss_legendre, integrate_piecewise

__all__ = [
    "QuadratureSpec",
    "Region",
    "CurrentMode",
    "HydroObservables",
    "initial_occupation",
    "phase_space_density",
    "hydro_density",
    "hydro_entropy_density",
    "hydro_region_entropy",
    "hydro_particle_number",
    "hydro_reservoir_number",
    "hydro_current",
    "hydro_observables",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class QuadratureSpec:
    """Quadrature settings for the hydrodynamic integrals.

    ``k_nodes`` is the Gauss-Legendre order per smooth piece in ``k``.
    ``x_nodes_per_unit`` and ``margin`` only matter for the position-grid
    route of :func:`hydro_region_entropy` and for density profiles.
    """

    k_nodes: int = 64
    x_nodes_per_unit: float = 2.0
    margin: float = 4.0
    rtol: float = 1e-11
    max_depth: int = 40

    def __post_init__(self):
        if int(self.k_nodes) != self.k_nodes or self.k_nodes < 8:
            raise ParameterError(f"k_nodes must be an integer >= 8, got {self.k_nodes!r}")
        if not self.x_nodes_per_unit > 0:
            raise ParameterError("x_nodes_per_unit must be positive")
        if self.margin < 0:
            raise ParameterError("margin must be non-negative")
        if not (0 < self.rtol < 1):
            raise ParameterError("rtol must lie in (0, 1)")
        if self.max_depth < 1:
            raise ParameterError("max_depth must be >= 1")


class Region(str, enum.Enum):
    SYSTEM = "system"
    RESERVOIR = "reservoir"


class CurrentMode(str, enum.Enum):
    FLUX = "flux"
    DERIVATIVE = "derivative"


@dataclass
class HydroObservables:
    t: float
    x: np.ndarray
    rho: np.ndarray
    N_sys: float
    S_sys: float
    S_res: float
    I: float
    warnings: list[str] = field(default_factory=list)


DEFAULT_QUAD = QuadratureSpec()


def _quad(quad: QuadratureSpec | None) -> QuadratureSpec:
    return DEFAULT_QUAD if quad is None else quad


def _check_time(t: float) -> float:
    t = float(t)
    if not (math.isfinite(t) and t >= 0):
        raise DomainError(f"time must be finite and non-negative, got {t}")
    return t


def _run(f, pts, quad: QuadratureSpec, what: str, notes: list[str] | None = None) -> float:
    res: QuadResult = integrate_piecewise(f, pts, order=quad.k_nodes, rtol=quad.rtol, max_depth=quad.max_depth)
    if not res.converged:
        msg = f"{what}: k-quadrature hit the refinement cap (error estimate {res.error:.2e})"
        warnings.warn(msg, QuadratureWarning, stacklevel=3)
        if notes is not None:
            notes.append(msg)
    return res.value


def _special_k(spec: ModelSpec) -> list[float]:
    pts = [0.5 * math.pi]
    if spec.defect is DefectKind.DENSITY and spec.lam <= 2.0:
        # R_k vanishes on the resonance, where x log x loses smoothness
        pts.append(math.acos(0.5 * spec.lam))
    return pts


def _ratio(c: np.ndarray, vt: float) -> np.ndarray:
    # tiny t overflows to inf, which the arcsin filter then drops
    with np.errstate(over="ignore"):
        return c / vt


def _arcsin_pairs(values: np.ndarray) -> np.ndarray:
    values = values[(values > 0.0) & (values < 1.0)]
    a = np.arcsin(values)
    return np.concatenate((a, math.pi - a))


# --------------------------------------------------------------------------
# phase-space density
# --------------------------------------------------------------------------


def initial_occupation(x, N: int):
    """Filled box ``theta(-x) - theta(-x-N)`` with ``theta(0) = 1``."""
    x = np.asarray(x, dtype=float)
    out = ((x <= 0.0) & (x > -N)).astype(float)
    return float(out) if out.ndim == 0 else out


def phase_space_density(spec: ModelSpec, x, k, t: float):
    """Occupation ``n_t(x, k)`` from the truncated image sums.

    ``x`` and ``k`` broadcast against each other; ``k`` must lie in
    ``[-pi, pi]``.  Points with ``x <= 0`` use the system expressions.
    The sum over the reflection count stops at
    ``ceil((v_F t + |x|) / 2N) + 1``; every later image has empty support.
    """
    t = _check_time(t)
    x, k = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(k, dtype=float))
    if np.any(np.abs(k) > math.pi):
        raise DomainError("wavenumber must lie in [-pi, pi]")
    N = spec.N
    two_n = 2.0 * N
    d = 2.0 * spec.g * t * np.sin(k)
    r = reflection_coefficients(spec.defect, spec.lam, k)
    tr = 1.0 - r
    n0 = lambda y: initial_occupation(y, N)  # noqa: E731

    s_max = int(math.ceil((spec.fermi_velocity * t + float(np.max(np.abs(x), initial=0.0))) / two_n)) + 1
    out = np.zeros(x.shape)
    right = k > 0
    left = k < 0
    res = x > 0
    sys_ = (x <= 0) & (x >= -N)
    for s in range(s_max + 1):
        rs = r**s
        pair = n0(x + s * two_n - d) + n0(-x - s * two_n - two_n + d)
        out += np.where(res & right, tr * rs * pair, 0.0)
        out += np.where(sys_ & right, rs * pair, 0.0)
        back = r ** (s + 1) * n0(-x + s * two_n + d) + rs * n0(x - s * two_n - d)
        out += np.where(sys_ & left, back, 0.0)
    return float(out) if out.ndim == 0 else out


def _occupations(spec: ModelSpec, x: float, k: np.ndarray, t: float):
    """Right- and left-mover occupations at position ``x`` for ``k`` in (0, pi).

    Closed form of the image sums: only the image whose unfolded source lies
    in the slab contributes, and its reflection count is a floor / ceiling.
    """
    two_n = 2.0 * spec.N
    d = spec.fermi_velocity * t * np.sin(k)
    r = reflection_coefficients(spec.defect, spec.lam, k)
    w = d - x
    n_right = np.where(w >= 0.0, r ** np.floor(np.maximum(w, 0.0) / two_n), 0.0)
    if x > 0:
        return (1.0 - r) * n_right, np.zeros_like(n_right)
    if x < -spec.N:
        z = np.zeros_like(n_right)
        return z, z
    u = x + d
    n_left = np.where(u > -spec.N, r ** np.ceil(u / two_n), 0.0)
    return n_right, n_left


def _point_breakpoints(spec: ModelSpec, x: float, t: float) -> np.ndarray:
    vt = spec.fermi_velocity * t
    two_n = 2.0 * spec.N
    jmax = int(math.ceil((vt + abs(x)) / two_n)) + 1
    j = np.arange(-1, jmax + 1, dtype=float)
    c = np.concatenate((x + j * two_n, j * two_n - x))
    pts = _arcsin_pairs(_ratio(c, vt))
    return clean_breakpoints(0.0, math.pi, np.concatenate((pts, _special_k(spec))))


def _point_integral(spec: ModelSpec, x: float, t: float, quad, functional, what: str, notes=None) -> float:
    t = _check_time(t)
    x = float(x)
    if t == 0.0:
        n = initial_occupation(x, spec.N)
        return float(functional(np.array([n]))[0])
    if x < -spec.N or x > spec.fermi_velocity * t:
        # outside the box before anything arrives, or beyond the ballistic front
        return float(functional(np.array([0.0]))[0])

    def f(k):
        nr, nl = _occupations(spec, x, k, t)
        return (functional(nr) + functional(nl)) / TWO_PI

    # the folded integrand covers both signs of k
    return _run(f, _point_breakpoints(spec, x, t), _quad(quad), what, notes)


def hydro_density(spec: ModelSpec, x, t: float, quad: QuadratureSpec | None = None):
    """Particle density ``rho(x) = (1/2pi) int n_t(x, k) dk``."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.array([_point_integral(spec, xi, t, quad, lambda n: n, "hydro_density") for xi in xs])
    return float(out[0]) if np.ndim(x) == 0 else out


def hydro_entropy_density(spec: ModelSpec, x, t: float, quad: QuadratureSpec | None = None):
    """Yang-Yang entropy density ``-(1/2pi) int [n log n + (1-n) log(1-n)] dk``."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.array([_point_integral(spec, xi, t, quad, mode_entropy, "hydro_entropy_density") for xi in xs])
    return float(out[0]) if np.ndim(x) == 0 else out


# --------------------------------------------------------------------------
# region integrals (position integral done exactly at fixed k)
# --------------------------------------------------------------------------


def _step_segment(a, b, r, functional, two_n: float, use_ceil: bool, scale=1.0):
    """Exact ``int_a^b functional(scale * r**j(w)) dw`` for ``b - a <= 2N``.

    ``j(w)`` is ``floor(w / 2N)`` or ``ceil(w / 2N)``; at most one jump.
    """
    if use_ceil:
        j0 = np.ceil(a / two_n)
        edge = j0 * two_n
        j1 = j0 + 1.0
    else:
        j0 = np.floor(a / two_n)
        edge = (j0 + 1.0) * two_n
        j1 = j0 + 1.0
    first = np.minimum(b, edge) - a
    second = np.maximum(b - edge, 0.0)
    return first * functional(scale * r**j0) + second * functional(scale * r**j1)


def _system_kernel(spec: ModelSpec, k: np.ndarray, t: float, functional) -> np.ndarray:
    N = float(spec.N)
    two_n = 2.0 * N
    d = spec.fermi_velocity * t * np.sin(k)
    r = reflection_coefficients(spec.defect, spec.lam, k)
    right = _step_segment(d, d + N, r, functional, two_n, use_ceil=False)
    left = _step_segment(d - N, d, r, functional, two_n, use_ceil=True)
    return right + left


def _reservoir_kernel(spec: ModelSpec, k: np.ndarray, t: float, functional) -> np.ndarray:
    two_n = 2.0 * spec.N
    d = spec.fermi_velocity * t * np.sin(k)
    r = reflection_coefficients(spec.defect, spec.lam, k)
    tr = 1.0 - r
    jfull = np.floor(d / two_n)
    out = (d - jfull * two_n) * functional(tr * r**jfull)
    jmax = int(np.max(jfull, initial=0.0))
    for j in range(jmax):
        mask = jfull > j
        out += np.where(mask, two_n * functional(tr * r**j), 0.0)
    return out


def _region_breakpoints(spec: ModelSpec, t: float) -> np.ndarray:
    vt = spec.fermi_velocity * t
    jmax = int(math.floor(vt / spec.N)) + 1
    c = np.arange(1, jmax + 1, dtype=float) * spec.N
    pts = _arcsin_pairs(_ratio(c, vt))
    return clean_breakpoints(0.0, math.pi, np.concatenate((pts, _special_k(spec))))


def _region_integral(spec, t, quad, region: Region, functional, what, notes=None) -> float:
    t = _check_time(t)
    region = Region(region)
    if t == 0.0:
        if region is Region.SYSTEM:
            return float(spec.N * functional(np.array([1.0]))[0])
        return 0.0
    kernel = _system_kernel if region is Region.SYSTEM else _reservoir_kernel

    def f(k):
        return kernel(spec, k, t, functional) / TWO_PI

    return _run(f, _region_breakpoints(spec, t), _quad(quad), what, notes)


def _x_grid_region_entropy(spec: ModelSpec, t: float, region: Region, quad: QuadratureSpec) -> float:
    # independent route: composite 4-point Gauss-Legendre in x over s_hydro(x)
    if region is Region.SYSTEM:
        lo, hi = -float(spec.N), 0.0
    else:
        lo, hi = 0.0, spec.fermi_velocity * t + quad.margin
    length = hi - lo
    if length <= 0:
        return 0.0
    panels = max(1, int(math.ceil(length * quad.x_nodes_per_unit / 4.0)))
    edges = np.linspace(lo, hi, panels + 1)
    xg, wg = gauss_legendre(4)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    weights = (half[:, None] * wg[None, :]).ravel()
    vals = hydro_entropy_density(spec, nodes, t, quad)
    return float(np.sum(vals * weights))


def hydro_region_entropy(
    spec: ModelSpec,
    t: float,
    region: Region | str = Region.SYSTEM,
    quad: QuadratureSpec | None = None,
    method: str = "exact-x",
) -> float:
    """Yang-Yang entropy of the system ``[-N, 0]`` or the reservoir ``[0, inf)``.

    ``method="exact-x"`` integrates position exactly at each ``k`` and then
    runs the breakpointed ``k`` quadrature.  ``method="x-grid"`` integrates
    the entropy density on a composite position grid (``x_nodes_per_unit``,
    reservoir cut at ``v_F t + margin``); it is slower and only accurate to
    the grid resolution.
    """
    region = Region(region)
    quad = _quad(quad)
    if method == "x-grid":
        return _x_grid_region_entropy(spec, _check_time(t), region, quad)
    if method != "exact-x":
        raise ParameterError(f"unknown method {method!r}")
    return _region_integral(spec, t, quad, region, mode_entropy, f"S_hydro[{region.value}]")


def hydro_particle_number(spec: ModelSpec, t: float, quad: QuadratureSpec | None = None) -> float:
    """Particles left in the box, ``int_{-N}^0 rho dx``."""
    return _region_integral(spec, t, quad, Region.SYSTEM, lambda n: n, "N_sys")


def hydro_reservoir_number(spec: ModelSpec, t: float, quad: QuadratureSpec | None = None) -> float:
    return _region_integral(spec, t, quad, Region.RESERVOIR, lambda n: n, "N_res")


def hydro_current(
    spec: ModelSpec,
    t: float,
    quad: QuadratureSpec | None = None,
    mode: CurrentMode | str = CurrentMode.FLUX,
    dt: float = 0.5,
) -> float:
    """Current into the reservoir.

    ``flux``: ``(1/2pi) int_0^pi v_k n_t(0+, k) dk`` (everything at ``0+``
    moves right and never comes back).  ``derivative``: central difference
    of the particle number with step ``dt``.
    """
    t = _check_time(t)
    mode = CurrentMode(mode)
    quad = _quad(quad)
    if mode is CurrentMode.DERIVATIVE:
        if dt <= 0 or t < dt:
            raise DomainError(f"derivative mode needs t >= dt > 0, got t={t}, dt={dt}")
        up = hydro_particle_number(spec, t + dt, quad)
        down = hydro_particle_number(spec, t - dt, quad)
        return -(up - down) / (2.0 * dt)

    two_n = 2.0 * spec.N
    vf = spec.fermi_velocity

    def f(k):
        d = vf * t * np.sin(k)
        r = reflection_coefficients(spec.defect, spec.lam, k)
        return vf * np.sin(k) * (1.0 - r) * r ** np.floor(d / two_n) / TWO_PI

    if t == 0.0:
        # nothing has crossed the junction yet; the plateau starts at 0+
        return 0.0
    vt = vf * t
    c = np.arange(1, int(vt / two_n) + 2, dtype=float) * two_n
    pts = clean_breakpoints(0.0, math.pi, np.concatenate((_arcsin_pairs(_ratio(c, vt)), _special_k(spec))))
    return _run(f, pts, quad, "I_hydro")


def hydro_observables(
    spec: ModelSpec,
    t: float,
    quad: QuadratureSpec | None = None,
    x=None,
) -> HydroObservables:
    quad = _quad(quad)
    notes: list[str] = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", QuadratureWarning)
        if x is None:
            x = np.arange(-spec.N, int(spec.fermi_velocity * t + quad.margin) + 1, dtype=float)
        x = np.asarray(x, dtype=float)
        rho = hydro_density(spec, x, t, quad) if x.size else np.empty(0)
        obs = HydroObservables(
            t=float(t),
            x=x,
            rho=np.atleast_1d(rho),
            N_sys=hydro_particle_number(spec, t, quad),
            S_sys=hydro_region_entropy(spec, t, Region.SYSTEM, quad),
            S_res=hydro_region_entropy(spec, t, Region.RESERVOIR, quad),
            I=hydro_current(spec, t, quad),
        )
    notes.extend(str(w.message) for w in caught if issubclass(w.category, QuadratureWarning))
    obs.warnings = notes
    return obs


def scaled_time_grid(spec: ModelSpec, tau) -> np.ndarray:
    """Times ``tau * t_P`` for dimensionless ``tau``."""
    return np.asarray(tau, dtype=float) * page_time(spec)
