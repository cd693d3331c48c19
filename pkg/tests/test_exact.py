import math
from pathlib import Path

import numpy as np
import pytest

from oracles import dense_observables
from pagecurve import ExactPropagator, ModelSpec, build_hamiltonian
from pagecurve.errors import NumericError, ValidityWindowWarning
from pagecurve.exact import (
    SubsystemSpectrum,
    diagonalize,
    entropy_from_cumulant,
    evolve_occupied_orbitals,
    junction_current,
    number_cumulant2,
    site_density,
    subsystem_spectrum,
    vonneumann_entropy,
)

DATA = Path(__file__).parent / "data"
T_RABI = math.pi / 1.6


def two_site():
    return ModelSpec(N=1, N_b=1, g=0.5, g_c=0.4, defect="hopping")


def test_diagonalize_two_site():
    d = diagonalize(build_hamiltonian(ModelSpec(N=1, N_b=1, g=0.5, g_c=0.5, defect="hopping")))
    assert np.allclose(d.eigenvalues, [-0.5, 0.5], atol=1e-15)
    d = diagonalize(build_hamiltonian(two_site()))
    assert np.allclose(d.eigenvalues, [-0.4, 0.4], atol=1e-15)


def test_open_chain_spectrum():
    s = ModelSpec(N=32, N_b=32, g=0.5, g_c=0.5, defect="hopping")
    d = diagonalize(build_hamiltonian(s))
    m = np.arange(1, 65)
    expected = np.sort(-2 * 0.5 * np.cos(np.pi * m / 65))
    assert np.max(np.abs(d.eigenvalues - expected)) <= 1e-10


@pytest.mark.parametrize("defect", ["conformal", "hopping", "density"])
def test_decomposition_invariants(defect):
    h = build_hamiltonian(ModelSpec(N=6, N_b=20, defect=defect))
    d = diagonalize(h)
    u = d.eigenvectors
    assert np.max(np.abs(d.reconstruct() - h)) <= 1e-10 * np.max(np.abs(h))
    assert np.max(np.abs(u.T @ u - np.eye(len(h)))) <= 1e-10


def test_diagonalize_reports_bad_input():
    with pytest.raises(NumericError, match="eigensolver"):
        diagonalize(np.array([[np.nan, 0.0], [0.0, 1.0]]))
    with pytest.raises(NumericError):
        diagonalize(np.zeros((2, 3)))


def test_two_site_rabi():
    s = two_site()
    frame = evolve_occupied_orbitals(s, diagonalize(build_hamiltonian(s)), T_RABI)
    rho = site_density(frame)
    assert np.allclose(rho, [0.5, 0.5], atol=1e-14)
    # positive current fixes the sign convention
    assert junction_current(frame, s) == pytest.approx(0.4 * math.sin(2 * 0.4 * T_RABI), abs=1e-14)
    assert junction_current(frame, s) == pytest.approx(0.4, abs=1e-14)
    spec = subsystem_spectrum(frame)
    assert spec.eigenvalues[0] == pytest.approx(0.5, abs=1e-14)
    assert vonneumann_entropy(spec) == pytest.approx(math.log(2), abs=1e-14)
    assert number_cumulant2(spec) == pytest.approx(0.25, abs=1e-14)


def test_initial_frame():
    s = ModelSpec(N=4, N_b=6)
    prop = ExactPropagator(s)
    frame = prop.frame(0.0)
    assert np.allclose(site_density(frame), [1] * 4 + [0] * 6, atol=1e-14)
    spec = subsystem_spectrum(frame)
    assert np.all(spec.eigenvalues == 1.0)
    obs = prop.observables(0.0)
    assert obs["S"] == 0.0 and obs["kappa2"] == 0.0
    assert obs["I"] == pytest.approx(0.0, abs=1e-15)
    assert obs["N_sys"] == pytest.approx(4.0, abs=1e-12)


def test_golden_frame():
    gold = np.load(DATA / "golden_N4_Nb16_t8.npz")
    s = ModelSpec(N=4, N_b=16)
    frame = ExactPropagator(s).frame(8.0)
    assert np.max(np.abs(frame.orbitals - gold["orbitals"])) <= 1e-8
    assert np.max(np.abs(subsystem_spectrum(frame).eigenvalues - gold["spectrum"])) <= 1e-8
    assert np.max(np.abs(site_density(frame) - gold["rho"])) <= 1e-8


@pytest.mark.parametrize("defect", ["conformal", "hopping", "density"])
@pytest.mark.parametrize("shape", [(1, 1), (2, 6), (4, 16), (3, 9)])
def test_matches_dense_oracle(defect, shape):
    N, N_b = shape
    s = ModelSpec(N=N, N_b=N_b, g=0.5, g_c=0.4, defect=defect)
    prop = ExactPropagator(s)
    for t in (0.0, 0.7, 3.3, 9.1):
        got = prop.observables(t)
        ref = dense_observables(N, N_b, 0.5, 0.4, defect, t)
        for key in ("I", "S", "kappa2", "N_sys"):
            assert got[key] == pytest.approx(ref[key], abs=1e-8), key
        assert np.max(np.abs(prop.density_profile(t) - ref["rho"])) <= 1e-8


def test_unitarity_and_conservation():
    s = ModelSpec(N=10, N_b=60, defect="density")
    prop = ExactPropagator(s)
    for t in (0.0, 5.0, 21.0, 47.5):
        a = prop.frame(t).orbitals
        assert np.max(np.abs(a.conj().T @ a - np.eye(10))) <= 1e-8
        assert site_density(prop.frame(t)).sum() == pytest.approx(10.0, abs=1e-8)


def test_continuity_equation():
    s = ModelSpec(N=10, N_b=80)
    prop = ExactPropagator(s)
    t = np.arange(0.0, 30.0 + 1e-12, 0.25)
    ser = prop.series(t)
    outflow = np.concatenate(([0.0], np.cumsum(0.5 * (ser["I"][1:] + ser["I"][:-1]) * np.diff(t))))
    assert np.max(np.abs(ser["N_sys"] + outflow - 10.0)) <= 1e-3 * 10.0


def test_bounds_over_time():
    s = ModelSpec(N=8, N_b=40, defect="hopping")
    prop = ExactPropagator(s)
    for t in np.linspace(0, 35, 15):
        a = prop.frame(t)
        spec = subsystem_spectrum(a)
        assert -1e-9 <= spec.raw_min and spec.raw_max <= 1 + 1e-9
        S, k2 = vonneumann_entropy(spec), number_cumulant2(spec)
        assert 0 <= S <= 8 * math.log(2)
        assert 0 <= k2 <= 8 / 4
        assert (S == 0) == (k2 == 0)


def test_defect_free_limit_agrees():
    hop = ExactPropagator(ModelSpec(N=6, N_b=30, g_c=0.5, defect="hopping"))
    conf = ExactPropagator(ModelSpec(N=6, N_b=30, g_c=0.5, defect="conformal"))
    for t in (1.0, 7.0, 15.0):
        a, b = hop.observables(t), conf.observables(t)
        for key in a:
            assert a[key] == pytest.approx(b[key], abs=1e-10)


def test_entropy_edge_cases():
    assert vonneumann_entropy(SubsystemSpectrum(np.array([1.0, 0.0, 1.0]))) == 0.0
    assert vonneumann_entropy(SubsystemSpectrum(np.array([0.5]))) == pytest.approx(0.693147, abs=1e-6)
    assert number_cumulant2(SubsystemSpectrum(np.array([0.5]))) == 0.25
    # roundoff just outside [0, 1] is snapped, not propagated as nan
    assert vonneumann_entropy(SubsystemSpectrum(np.array([1 + 1e-14, -1e-14]))) == 0.0


def test_entropy_from_cumulant():
    assert entropy_from_cumulant(0.0) == 0.0
    assert entropy_from_cumulant(0.25) == pytest.approx(0.822467, abs=1e-6)
    with pytest.raises(ValueError):
        entropy_from_cumulant(-1.0)


def test_validity_warning():
    prop = ExactPropagator(ModelSpec(N=2, N_b=10))
    with pytest.warns(ValidityWindowWarning):
        prop.series([0.0, 9.5])
    with pytest.raises(ValueError):
        prop.observables(-1.0)
