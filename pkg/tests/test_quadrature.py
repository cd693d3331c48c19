import math

import numpy as np
import pytest

from pagecurve.quadrature import clean_breakpoints, gauss_legendre, integrate_piecewise


def test_gauss_legendre_exact_for_polynomials():
    x, w = gauss_legendre(8)
    assert np.sum(w * x**14) == pytest.approx(2 / 15, rel=1e-14)


def test_clean_breakpoints():
    pts = clean_breakpoints(0.0, 1.0, [0.5, 0.5 + 1e-17, -1.0, 2.0, float("nan"), 0.25])
    assert pts.tolist() == [0.0, 0.25, 0.5, 1.0]


def test_step_function_with_breakpoint_is_exact():
    res = integrate_piecewise(lambda k: np.where(k < 1.0, 2.0, 0.5), [0.0, 1.0, math.pi])
    assert res.converged
    assert res.value == pytest.approx(2.0 + 0.5 * (math.pi - 1.0), rel=1e-14)


def test_adaptive_refinement_on_sharp_peak():
    # narrow enough to need bisection, wide enough for the first rule to see
    f = lambda k: np.exp(-((k - 0.3) ** 2) / 1e-3)  # noqa: E731
    res = integrate_piecewise(f, [0.0, 1.0], order=16, rtol=1e-12)
    assert res.converged and res.pieces > 1
    assert res.value == pytest.approx(math.sqrt(math.pi * 1e-3), rel=1e-10)


def test_depth_cap_reports_non_convergence():
    res = integrate_piecewise(lambda k: np.sign(k - 1 / 3), [0.0, 1.0], order=8, max_depth=3)
    assert not res.converged


def test_non_finite_integrand_stops():
    res = integrate_piecewise(lambda k: 1.0 / (k - 0.5), [0.0, 0.5, 1.0], order=8)
    assert not res.converged
