"""Order-zero modified Bessel and modified Struve functions.

``I0(x) - L0(x)`` is the factor that appears in the long-time conformal
density.  For large ``x`` both terms grow like ``exp(x)`` while the
difference decays like ``2 / (pi x)``, so it gets its own evaluator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, RangeError
from .quadrature import gauss_legendre

__all__ = ["SpecialValue", "bessel_I0", "struve_L0", "besselI0_minus_struveL0"]

X_MAX = 700.0
SERIES_CROSS = 8.0
ASYMPTOTIC_CROSS = 40.0
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class SpecialValue:
    value: float
    est_rel_error: float

    def __float__(self) -> float:
        return self.value


def _check_range(x: float) -> float:
    x = float(x)
    if not math.isfinite(x) or abs(x) > X_MAX:
        raise RangeError(f"|x| must be <= {X_MAX:g}, got {x!r}")
    return x


def _i0_series(x: float) -> tuple[float, float]:
    q = 0.25 * x * x
    term = 1.0
    running = 1.0
    terms = [term]
    k = 0
    while True:
        k += 1
        term *= q / (k * k)
        terms.append(term)
        running += term
        # terms peak near k = x/2; stop once past it and negligible
        if k * k > q and term <= 1e-17 * running:
            break
    total = math.fsum(terms)
    # positive terms: rounding grows at most linearly with the term count
    return total, k * _EPS + term / total


def bessel_I0(x: float) -> SpecialValue:
    """Modified Bessel function of the first kind, order zero."""
    x = abs(_check_range(x))
    value, err = _i0_series(x)
    return SpecialValue(value, err)


def _l0_series_positive(x: float) -> tuple[float, float]:
    half = 0.5 * x
    q = half * half
    term = 2.0 * x / math.pi  # (x/2) / Gamma(3/2)^2
    running = term
    terms = [term]
    k = 0
    while True:
        term *= q / ((k + 1.5) ** 2)
        k += 1
        terms.append(term)
        running += term
        if k > half and term <= 1e-17 * running:
            break
    total = math.fsum(terms)
    return total, k * _EPS + term / total


def struve_L0(x: float) -> SpecialValue:
    """Modified Struve function, order zero (odd in ``x``)."""
    x = _check_range(x)
    if x == 0.0:
        return SpecialValue(0.0, 0.0)
    value, err = _l0_series_positive(abs(x))
    return SpecialValue(math.copysign(value, x), err)


def _difference_series(x: float) -> tuple[float, float]:
    # sum_n c_n (x/2)^n with c_2k = 1/(k!)^2 and c_{2k+1} = -1/Gamma(k+3/2)^2
    half = 0.5 * x
    q = half * half
    even = 1.0
    odd = 2.0 * x / math.pi
    terms = [even, -odd]
    k = 0
    while True:
        k += 1
        even *= q / (k * k)
        odd *= q / ((k + 0.5) ** 2)
        terms.append(even)
        terms.append(-odd)
        if max(even, odd) < 1e-18 and k > half:
            break
    value = math.fsum(terms)
    biggest = max(abs(t) for t in terms)
    return value, (8 * _EPS * biggest + max(even, odd)) / value


def _difference_quadrature(x: float, order: int = 32) -> tuple[float, float]:
    # (2/pi) int_0^{pi/2} exp(-x sin phi) dphi, graded panels near phi = 0
    edges = [0.0]
    step = 1.0 / x
    while edges[-1] + step < 0.5 * math.pi:
        edges.append(edges[-1] + step)
        step *= 2.0
    edges.append(0.5 * math.pi)
    edges = np.asarray(edges)

    def rule(n: int) -> float:
        nodes, weights = gauss_legendre(n)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        phi = mid[:, None] + half[:, None] * nodes[None, :]
        return float(np.sum(half[:, None] * weights[None, :] * np.exp(-x * np.sin(phi))))

    fine = rule(order)
    coarse = rule(order // 2)
    value = 2.0 / math.pi * fine
    return value, abs(fine - coarse) / fine + 4 * _EPS


def _difference_asymptotic(x: float) -> tuple[float, float]:
    # (2 / (pi x)) sum_k ((2k-1)!!)^2 / x^(2k), cut at the smallest term
    inv2 = 1.0 / (x * x)
    term = 1.0
    terms = [term]
    k = 0
    while True:
        nxt = term * (2 * k + 1) ** 2 * inv2
        if nxt >= term or nxt < 1e-18:
            break
        terms.append(nxt)
        term = nxt
        k += 1
    total = math.fsum(terms)
    omitted = abs(term) * (2 * k + 1) ** 2 * inv2
    return 2.0 / (math.pi * x) * total, omitted / abs(total) + 2 * _EPS


def besselI0_minus_struveL0(x: float) -> SpecialValue:
    """``I0(x) - L0(x)`` for ``x >= 0`` without cancellation.

    Three branches: compensated power series up to ``x = 8``, Gauss-Legendre
    quadrature of ``(2/pi) int_0^{pi/2} exp(-x sin phi) dphi`` up to
    ``x = 40``, and the large-argument expansion (leading term
    ``2 / (pi x)``) beyond.
    """
    x = float(x)
    if not math.isfinite(x) or x < 0:
        raise DomainError(f"x must be finite and non-negative, got {x!r}")
    if x == 0.0:
        return SpecialValue(1.0, 0.0)
    if x <= SERIES_CROSS:
        value, err = _difference_series(x)
    elif x < ASYMPTOTIC_CROSS:
        value, err = _difference_quadrature(x)
    else:
        value, err = _difference_asymptotic(x)
    return SpecialValue(value, err)
