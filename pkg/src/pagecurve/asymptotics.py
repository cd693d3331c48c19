"""Closed forms and asymptotics of the hydrodynamic solution.

Short times (before any quasiparticle returns from the wall): density
profiles, the plateau current and the linear entropy rate.  Conformal
defect: the all-time density as a floor-indexed arccos sum.  Long times: the
Poisson-resummed phase-space density and what follows from it, plus the
power-law tail fitter.

All formulas are written for general ``g``; with ``g = 1/2`` the Fermi
velocity is 1 and ``t_P = 2N``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UnsupportedDefectError
from .hydro import QuadratureSpec, _quad, _run
from .model import DefectKind, ModelSpec, page_time, reflection_coefficients
from .quadrature import clean_breakpoints, integrate_piecewise
from .special import besselI0_minus_struveL0

__all__ = [
    "TailFit",
    "early_density_closed",
    "early_current_closed",
    "early_current_quadrature",
    "density_current_printed",
    "early_entropy_rate",
    "early_entropy_rate_closed",
    "conformal_density_alltime",
    "longtime_phase_space",
    "longtime_current",
    "conformal_longtime_current",
    "conformal_longtime_current_prefactor",
    "conformal_longtime_density",
    "conformal_longtime_entropy",
    "longtime_entropy_profile",
    "fit_tail",
]

_CLAMP_TOL = 1e-12


def _require_conformal(spec: ModelSpec) -> None:
    if spec.defect is not DefectKind.CONFORMAL:
        raise UnsupportedDefectError(f"only defined for the conformal defect, got {spec.defect.value}")


def _clamped_acos(z):
    z = np.asarray(z, dtype=float)
    return np.arccos(np.clip(z, -1.0, 1.0))


def _clamped_asin(z):
    z = np.asarray(z, dtype=float)
    return np.arcsin(np.clip(z, -1.0, 1.0))


# --------------------------------------------------------------------------
# before the Page time
# --------------------------------------------------------------------------


def _density_defect_profile(lam: float, z: float) -> float:
    """Reservoir density at ``z = x / (v_F t)`` for the density defect."""
    a = float(_clamped_asin(z))
    if a == 0.0:
        # cot(a/2) diverges; the arctan terms take their limits
        cot_terms = (
            lam * (2 + lam - lam**2) * math.copysign(0.5 * math.pi, lam - 2.0)
            + lam * (lam**2 + lam - 2) * 0.5 * math.pi
        )
    else:
        cot = 1.0 / math.tan(0.5 * a)
        cot_terms = lam * (2 + lam - lam**2) * math.atan((lam - 2) * cot / lam) + lam * (
            lam**2 + lam - 2
        ) * math.atan(lam * cot / (2 + lam))
    tan = math.tan(0.5 * a)
    tan_terms = lam * (lam + 1) * (lam - 2) * math.atan((lam - 2) * tan / lam) - lam * (lam + 2) * (
        lam - 1
    ) * math.atan(lam * tan / (lam + 2))
    bracket = -(lam**2 - 2) * math.pi + 2 * (lam**2 - 2) * a + cot_terms + tan_terms
    return bracket / (2 * math.pi * (lam**4 - 3 * lam**2 + 2))


def _early_reservoir_density(spec: ModelSpec, z: float) -> float:
    lam = spec.lam
    if spec.defect is DefectKind.CONFORMAL:
        return lam**2 / math.pi * float(_clamped_acos(z))
    if spec.defect is DefectKind.HOPPING:
        base = float(_clamped_acos(z)) / math.pi
        if abs(lam - 1.0) < 1e-15:
            return base
        ratio = (1 - lam**2) / (1 + lam**2)
        if z >= 1.0:
            arg = -math.inf
        else:
            arg = -(1 + lam**2) * z / ((1 - lam**2) * math.sqrt(1 - z * z))
        return base - ratio * (0.5 + math.atan(arg) / math.pi)
    if lam == 0.0:
        return float(_clamped_acos(z)) / math.pi
    if abs(lam - 1.0) < 1e-12 or abs(lam * lam - 2.0) < 1e-12:
        raise DomainError("closed-form density-defect profile is singular at lambda = 1 and sqrt(2)")
    return _density_defect_profile(lam, z)


def early_density_closed(spec: ModelSpec, x: float, t: float) -> float:
    """Pre-Page density profile in closed form for the spec's defect.

    Beyond the ballistic front ``|x| > v_F t`` the untouched plateau is
    returned (1 inside the box, 0 in the reservoir).  Valid while no
    quasiparticle has come back from the wall (``t <= N / v_F``).
    """
    x = float(x)
    if t <= 0:
        raise DomainError("t must be positive")
    vt = spec.fermi_velocity * t
    if abs(x) > vt:
        return 1.0 if x <= 0 else 0.0
    z = abs(x) / vt
    out = _early_reservoir_density(spec, z)
    return out if x > 0 else 1.0 - out


def early_current_quadrature(spec: ModelSpec, quad: QuadratureSpec | None = None) -> float:
    """Plateau current ``(1/2pi) int_0^pi v_k T_k dk``."""
    vf = spec.fermi_velocity

    def f(k):
        return vf * np.sin(k) * (1.0 - reflection_coefficients(spec.defect, spec.lam, k)) / (2 * math.pi)

    pts = [0.5 * math.pi]
    if spec.defect is DefectKind.DENSITY and spec.lam <= 2:
        pts.append(math.acos(0.5 * spec.lam))
    return _run(f, clean_breakpoints(0.0, math.pi, pts), _quad(quad), "early_current")


def density_current_printed(lam: float) -> float:
    """Density-defect plateau current exactly as the closed form is usually quoted.

    It disagrees with the quadrature of the transmission (see
    :func:`early_current_closed`); kept so the discrepancy can be reported.
    """
    l = lam  # noqa: E741
    return (
        1 / (math.pi * (1 - l**2))
        + l**2 * (l - 2) ** 2 * math.log((l - 2) ** 2) / (8 * math.pi * (l - 1) ** 2 * (l**2 - 2))
        - l**2 * (l**4 - 3 * l**2 + 4) * math.log(l) / (2 * math.pi * (l**2 - 1) ** 2 * (l**2 - 1))
        + l**2 * (2 + l) ** 2 * math.log(2 + l) / (4 * math.pi * (l + 1) ** 2 * (l**2 - 2))
    )


def early_current_closed(spec: ModelSpec, quad: QuadratureSpec | None = None, rtol: float = 1e-6) -> float:
    """Pre-Page plateau current.

    Conformal: ``v_F lam^2 / (2 pi) * 2``.  Hopping:
    ``v_F [1/pi - (1-lam^2)^2 artanh(2 lam/(1+lam^2)) / (2 pi lam (1+lam^2))]``.
    Density: the quoted closed form is evaluated and compared with the
    quadrature; the quadrature is returned and a warning carries the
    discrepancy when they differ by more than ``rtol``.
    """
    lam = spec.lam
    vf = spec.fermi_velocity
    if spec.defect is DefectKind.CONFORMAL:
        return vf * lam**2 / math.pi
    if spec.defect is DefectKind.HOPPING:
        if lam == 0.0:
            return 0.0
        if abs(lam - 1.0) < 1e-15:
            return vf / math.pi
        corr = (1 - lam**2) ** 2 * math.atanh(2 * lam / (1 + lam**2)) / (2 * math.pi * lam * (1 + lam**2))
        return vf * (1 / math.pi - corr)
    reference = early_current_quadrature(spec, quad)
    try:
        printed = vf * density_current_printed(lam)
    except (ValueError, ZeroDivisionError):
        printed = math.nan
    if not (abs(printed - reference) <= rtol * abs(reference)):
        warnings.warn(
            f"density-defect closed-form current {printed:.9g} disagrees with quadrature "
            f"{reference:.9g} at lambda={lam:g}; using the quadrature",
            RuntimeWarning,
            stacklevel=2,
        )
    return reference


def early_entropy_rate(spec: ModelSpec, quad: QuadratureSpec | None = None) -> float:
    """Slope ``alpha`` of the linear pre-Page entropy growth (quadrature)."""
    vf = spec.fermi_velocity
    from .exact import mode_entropy

    def f(k):
        tr = 1.0 - reflection_coefficients(spec.defect, spec.lam, k)
        return vf * np.sin(k) * mode_entropy(tr) / (2 * math.pi)

    pts = [0.5 * math.pi]
    if spec.defect is DefectKind.DENSITY and spec.lam <= 2:
        pts.append(math.acos(0.5 * spec.lam))
    return _run(f, clean_breakpoints(0.0, math.pi, pts), _quad(quad), "entropy_rate")


def early_entropy_rate_closed(spec: ModelSpec) -> float:
    """Conformal entropy rate ``-v_F [T log T + R log R] / pi``."""
    _require_conformal(spec)
    tr = spec.lam**2
    r = 1.0 - tr
    s = -(tr * math.log(tr) if tr > 0 else 0.0) - (r * math.log(r) if r > 0 else 0.0)
    return spec.fermi_velocity * s / math.pi


# --------------------------------------------------------------------------
# conformal defect at all times
# --------------------------------------------------------------------------


def conformal_density_alltime(spec: ModelSpec, x: float, t: float) -> float:
    """Conformal-defect density from the floor-indexed arccos sums.

    ``x <= 0`` is treated as the box side.  ``t`` must be positive.
    """
    _require_conformal(spec)
    if t <= 0:
        raise DomainError("t must be positive")
    x = float(x)
    if x < -spec.N:
        return 0.0
    lam2 = spec.lam**2
    r = 1.0 - lam2
    vt = spec.fermi_velocity * t
    two_n = 2.0 * spec.N

    def arc_sum(top: float, offset: float, sign: float, power_shift: int) -> float:
        smax = math.floor(top)
        if smax < 0:
            return 0.0
        s = np.arange(smax + 1, dtype=float)
        return float(np.sum(r ** (s + power_shift) * _clamped_acos((sign * x + s * two_n + offset) / vt)))

    right = arc_sum((vt - x) / two_n, 0.0, 1.0, 0) - arc_sum((vt - x) / two_n - 1.0, two_n, 1.0, 0)
    if x > 0:
        return lam2 / math.pi * right
    left = arc_sum(abs(vt + x) / two_n, 0.0, -1.0, 1) - arc_sum(abs(vt + x) / two_n - 1.0, two_n, -1.0, 1)
    return (right + left) / math.pi


# --------------------------------------------------------------------------
# long times
# --------------------------------------------------------------------------


def _longtime_prefactor(r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``T / |log R|`` and ``T^2 / (R |log R|)``, zero where ``R`` is 0 or 1."""
    r = np.asarray(r, dtype=float)
    tr = 1.0 - r
    good = (r > 0.0) & (r < 1.0)
    logr = np.where(good, np.log(np.where(good, r, 0.5)), -1.0)
    a = np.where(good, tr / np.abs(logr), 0.0)
    b = np.where(good, tr * tr / (np.where(good, r, 1.0) * np.abs(logr)), 0.0)
    return a, b


def longtime_phase_space(spec: ModelSpec, x, k, t: float):
    """Poisson-resummed (zero-mode) phase-space density for ``t >> t_P``.

    For ``x > 0`` only right movers (``0 < k < pi``) are occupied.  For
    ``x <= 0`` the value is the sum of the ``+k`` and ``-k`` occupations at
    the speed ``v_F |sin k|``.  Where ``R_k = 0`` the value is 0 by
    continuity.
    """
    x, k = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(k, dtype=float))
    two_n = 2.0 * spec.N
    r = reflection_coefficients(spec.defect, spec.lam, k)
    a, b = _longtime_prefactor(r)
    d = spec.fermi_velocity * t * np.abs(np.sin(k))
    with np.errstate(divide="ignore", invalid="ignore", over="ignore", under="ignore"):
        rs = np.where(r > 0, r, 1.0)
        decay = np.where(r > 0, rs ** (d / two_n), 0.0)
        res = b * rs ** (-x / two_n) * decay
        ax = np.abs(x)
        sys_ = a * decay * (rs ** (-ax / two_n) + rs ** (-1.0 + ax / two_n))
    out = np.where(x > 0, np.where(k > 0, res, 0.0), sys_)
    out = np.where(x < -spec.N, 0.0, out)
    return float(out) if out.ndim == 0 else out


def longtime_current(spec: ModelSpec, t: float, quad: QuadratureSpec | None = None) -> float:
    """``|I| = (1/2pi) int_0^pi T^2/(R|log R|) v_k R^{v_F t sin k / 2N} dk``.

    Only meaningful after the Page time; before it the density-defect
    integrand is not integrable at the transmission resonance.

    Raises
    ------
    DomainError
        ``t < t_P``.
    """
    if not t >= page_time(spec):
        raise DomainError(f"long-time current needs t >= t_P = {page_time(spec):g}, got {t!r}")
    vf = spec.fermi_velocity
    two_n = 2.0 * spec.N

    def f(k):
        r = reflection_coefficients(spec.defect, spec.lam, k)
        _, b = _longtime_prefactor(r)
        with np.errstate(divide="ignore", under="ignore"):
            decay = np.where(r > 0, np.where(r > 0, r, 1.0) ** (vf * t * np.sin(k) / two_n), 0.0)
        return b * vf * np.sin(k) * decay / (2 * math.pi)

    pts = [0.5 * math.pi]
    if spec.defect is not DefectKind.CONFORMAL:
        # the integrand is concentrated near k = 0 and pi at late times
        scale = (page_time(spec) / max(t, 1e-300)) ** (1.0 / 3.0)
        g = np.geomspace(min(1e-6, scale * 1e-3), 0.5 * math.pi, 40)
        pts.extend(g)
        pts.extend(math.pi - g)
        if spec.defect is DefectKind.DENSITY and spec.lam <= 2:
            pts.append(math.acos(0.5 * spec.lam))
    else:
        scale = page_time(spec) / max(t, 1e-300)
        g = np.geomspace(min(1e-6, scale * 1e-3), 0.5 * math.pi, 40)
        pts.extend(g)
        pts.extend(math.pi - g)
    return _run(f, clean_breakpoints(0.0, math.pi, pts), _quad(quad), "longtime_current")


def conformal_longtime_current_prefactor(spec: ModelSpec) -> float:
    """``v_F lam^4 / (pi (1-lam^2) |log(1-lam^2)|^3)``."""
    _require_conformal(spec)
    lam2 = spec.lam**2
    r = 1.0 - lam2
    if r <= 0.0:
        raise DomainError("long-time current needs lambda < 1")
    return spec.fermi_velocity * lam2 * lam2 / (math.pi * r * abs(math.log(r)) ** 3)


def conformal_longtime_current(spec: ModelSpec, t: float) -> float:
    """Pure ``(t / t_P)^-2`` tail of the conformal current."""
    if t <= 0:
        raise DomainError("t must be positive")
    return conformal_longtime_current_prefactor(spec) * (t / page_time(spec)) ** -2


@dataclass(frozen=True)
class LongtimeDensity:
    """Long-time density in its Struve/Bessel and simplified ``1/t`` forms."""

    struve_bessel: float
    simplified: float


def conformal_longtime_density(spec: ModelSpec, x: float, t: float) -> LongtimeDensity:
    """Long-time conformal density: Struve/Bessel form and its ``1/t`` limit.

    Both forms integrate the zero-mode phase-space density over ``k``; the
    first keeps ``I0 - L0`` of ``|log R| t / t_P`` exactly, the second uses
    its large-argument limit ``2 / (pi |log R| t / t_P)``.  ``x > 0`` is the
    reservoir side.
    """
    _require_conformal(spec)
    if t <= 0:
        raise DomainError("t must be positive")
    lam2 = spec.lam**2
    r = 1.0 - lam2
    if not (0.0 < r < 1.0):
        raise DomainError("long-time density needs 0 < lambda < 1")
    logr = abs(math.log(r))
    tau = t / page_time(spec)
    two_n = 2.0 * spec.N
    x = float(x)
    if x > 0:
        shape = lam2 / r * r ** (-x / two_n)
    elif x >= -spec.N:
        ax = abs(x)
        shape = r ** (-ax / two_n) + r ** (-1.0 + ax / two_n)
    else:
        return LongtimeDensity(0.0, 0.0)
    # (1/2pi) int_0^pi exp(-b sin k) dk = (I0(b) - L0(b)) / 2
    b = logr * tau
    struve = lam2 * shape / (2.0 * logr) * besselI0_minus_struveL0(b).value
    simplified = lam2 * shape / (math.pi * logr**2 * tau)
    return LongtimeDensity(struve, simplified)


def longtime_entropy_profile(spec: ModelSpec, x) -> np.ndarray:
    """Shape function whose box integral sets the conformal ``1/t`` entropy tail.

    With ``P(x) = R^{-1+|x|/2N} + R^{-|x|/2N}`` the Yang-Yang density of the
    zero-mode occupation behaves as
    ``T P(x) [2 - log T + log|log R| - log P(x)] / (pi |log R|^2 (t/t_P))``.
    """
    _require_conformal(spec)
    lam2 = spec.lam**2
    r = 1.0 - lam2
    logr = abs(math.log(r))
    ax = np.abs(np.asarray(x, dtype=float))
    p = r ** (-1.0 + ax / (2.0 * spec.N)) + r ** (-ax / (2.0 * spec.N))
    return p * (2.0 - math.log(lam2) + math.log(logr) - np.log(p))


def conformal_longtime_entropy(spec: ModelSpec, t: float, quad: QuadratureSpec | None = None) -> float:
    """Conformal ``1/t`` entropy tail of the box.

    ``lam^2 / (pi |log R|^2 (t/t_P)) * int_{-N}^0 B(x) dx`` with ``B`` from
    :func:`longtime_entropy_profile`.  Being a zero-mode result it settles
    about 5% below the full hydrodynamic entropy.
    """
    _require_conformal(spec)
    if t <= 0:
        raise DomainError("t must be positive")
    quad = _quad(quad)
    lam2 = spec.lam**2
    logr = abs(math.log(1.0 - lam2))
    tau = t / page_time(spec)
    res = integrate_piecewise(
        lambda x: longtime_entropy_profile(spec, x),
        np.linspace(-spec.N, 0.0, 9),
        order=quad.k_nodes,
        rtol=quad.rtol,
    )
    return lam2 / (math.pi * logr**2 * tau) * res.value


# --------------------------------------------------------------------------
# tails
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TailFit:
    """Least-squares power law ``y = prefactor * t**(-exponent)``."""

    exponent: float
    prefactor: float
    t_lo: float
    t_hi: float
    residual: float
    n_samples: int

    def __call__(self, t):
        return self.prefactor * np.asarray(t, dtype=float) ** (-self.exponent)


def fit_tail(t, y, window: tuple[float, float] | None = None, min_samples: int = 8) -> TailFit:
    """Fit a straight line in ``log t``-``log y`` over ``window``.

    Raises
    ------
    DomainError
        Fewer than ``min_samples`` points in the window, or a non-positive
        value inside it.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if t.shape != y.shape or t.ndim != 1:
        raise DomainError("t and y must be 1-D arrays of equal length")
    if window is None:
        window = (float(t.min()), float(t.max()))
    lo, hi = map(float, window)
    if not lo < hi:
        raise DomainError(f"empty fit window [{lo}, {hi}]")
    sel = (t >= lo) & (t <= hi)
    if np.count_nonzero(sel) < min_samples:
        raise DomainError(f"need at least {min_samples} samples in [{lo:g}, {hi:g}], got {np.count_nonzero(sel)}")
    ts, ys = t[sel], y[sel]
    if np.any(ts <= 0) or np.any(ys <= 0):
        raise DomainError("power-law fit needs positive t and y in the window")
    lt, ly = np.log(ts), np.log(ys)
    slope, intercept = np.polyfit(lt, ly, 1)
    resid = float(np.sqrt(np.mean((ly - (slope * lt + intercept)) ** 2)))
    return TailFit(float(-slope), float(math.exp(intercept)), lo, hi, resid, int(ts.size))
