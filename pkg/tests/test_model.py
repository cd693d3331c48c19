import math

import numpy as np
import pytest

from pagecurve import DefectKind, ModelSpec, build_hamiltonian, page_time
from pagecurve.errors import DomainError, ParameterError
from pagecurve.model import reflection_probability, transmission_probability


def lattice_reflection(defect, g, g_c, k):
    """Scattering of a plane wave on the infinite chain, by matching amplitudes."""
    eps = -2 * g * math.cos(k)
    e = np.exp(1j * k)
    # psi_j = e^{ikj} + r e^{-ikj} for j <= 0, tau e^{ikj} for j >= 1
    if defect == "hopping":
        a, b, onsite0, onsite1 = g, g_c, 0.0, 0.0
    elif defect == "density":
        a, b, onsite0, onsite1 = g, g, g_c, g_c
    else:
        c = math.sqrt(g * g - g_c * g_c)
        a, b, onsite0, onsite1 = g, g_c, c, -c
    # row of site 0: -a psi_-1 - b psi_1 + onsite0 psi_0 = eps psi_0
    # row of site 1: -b psi_0 - a psi_2 + onsite1 psi_1 = eps psi_1
    # unknowns r, tau with psi_-1 = e^{-ik} + r e^{ik}, psi_0 = 1 + r
    m = np.array(
        [
            [-a * e + (onsite0 - eps), -b * e],
            [-b, -a * e**2 + (onsite1 - eps) * e],
        ]
    )
    rhs = np.array([a / e - (onsite0 - eps), b])
    r, _ = np.linalg.solve(m, rhs)
    return abs(r) ** 2


def test_spec_defaults_and_derived_scales():
    s = ModelSpec(N=40, N_b=1024)
    assert s.defect is DefectKind.CONFORMAL
    assert s.lam == pytest.approx(0.8)
    assert s.fermi_velocity == 1.0
    assert page_time(s) == 80.0
    assert s.dim == 1064
    assert s.row(-39) == 0 and s.row(0) == 39 and s.row(1) == 40


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(N=0, N_b=4),
        dict(N=2, N_b=-1),
        dict(N=2.5, N_b=4),
        dict(N=2, N_b=4, g=0.0),
        dict(N=2, N_b=4, g_c=-0.1, defect="hopping"),
        dict(N=2, N_b=4, g_c=0.6),
        dict(N=2, N_b=4, g_c=0.0),
        dict(N=2, N_b=4, defect="wall"),
    ],
)
def test_invalid_specs_rejected(kwargs):
    with pytest.raises(ParameterError):
        ModelSpec(**kwargs)


def test_row_outside_chain():
    with pytest.raises(DomainError):
        ModelSpec(N=2, N_b=3).row(4)


@pytest.mark.parametrize("defect", ["conformal", "hopping", "density"])
def test_hamiltonian_symmetric_tridiagonal(defect):
    h = build_hamiltonian(ModelSpec(N=5, N_b=7, g_c=0.3, defect=defect))
    assert np.array_equal(h, h.T)
    assert np.count_nonzero(np.triu(h, 2)) == 0


def test_hamiltonian_junction_entries():
    s = ModelSpec(N=3, N_b=3, g=0.5, g_c=0.4)
    h = build_hamiltonian(s)
    r0, r1 = s.row(0), s.row(1)
    assert h[r0, r1] == -0.4
    assert h[r0, r0] == pytest.approx(0.3)
    assert h[r1, r1] == pytest.approx(-0.3)
    hd = build_hamiltonian(s.replace(defect="density"))
    assert hd[r0, r1] == -0.5 and hd[r0, r0] == 0.4 and hd[r1, r1] == 0.4


@pytest.mark.parametrize("defect", ["conformal", "hopping", "density"])
@pytest.mark.parametrize("k", [0.3, 1.0, math.pi / 2, 2.2, 2.9])
def test_reflection_matches_lattice_scattering(defect, k):
    g, g_c = 0.5, 0.4
    expected = lattice_reflection(defect, g, g_c, k)
    got = reflection_probability(defect, g_c / g, k)
    if defect == "density":
        # written for the resonance at lam = 2 cos k; the band -2g cos k mirrors it
        got = reflection_probability(defect, g_c / g, math.pi - k)
    assert got == pytest.approx(expected, abs=1e-12)


def test_conformal_reflection_is_flat():
    k = np.linspace(0.1, 3.0, 7)
    assert np.allclose(reflection_probability("conformal", 0.8, k), 0.36)
    assert np.allclose(transmission_probability("conformal", 0.8, k), 0.64)


def test_density_resonance_is_transparent():
    k0 = math.acos(0.4)
    assert reflection_probability("density", 0.8, k0) == pytest.approx(0.0, abs=1e-15)


def test_hopping_defect_free_limit():
    assert reflection_probability("hopping", 1.0, 1.1) == 0.0


@pytest.mark.parametrize("k", [0.0, math.pi, -0.1, float("nan")])
def test_reflection_domain(k):
    with pytest.raises(DomainError):
        reflection_probability("hopping", 0.8, k)
