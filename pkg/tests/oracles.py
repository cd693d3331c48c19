"""Dense reference implementations used only by the tests.

Everything here is written from the model definition with full matrices and
``scipy.linalg.expm``; nothing is shared with the package's propagator.
"""

import math

import numpy as np
import scipy.linalg


def dense_hamiltonian(N, N_b, g, g_c, defect):
    n = N + N_b
    h = np.zeros((n, n))
    for i in range(n - 1):
        h[i, i + 1] = h[i + 1, i] = -g
    j0, j1 = N - 1, N  # sites 0 and 1
    if defect == "conformal":
        h[j0, j1] = h[j1, j0] = -g_c
        h[j0, j0] = math.sqrt(g * g - g_c * g_c)
        h[j1, j1] = -math.sqrt(g * g - g_c * g_c)
    elif defect == "hopping":
        h[j0, j1] = h[j1, j0] = -g_c
    else:
        h[j0, j0] = h[j1, j1] = g_c
    return h


def dense_correlation(N, N_b, g, g_c, defect, t):
    """Full ``C(t) = exp(iht) C(0) exp(-iht)`` with ``C_ij = <c_i^dag c_j>``."""
    h = dense_hamiltonian(N, N_b, g, g_c, defect)
    c0 = np.zeros((N + N_b, N + N_b))
    c0[:N, :N] = np.eye(N)
    u = scipy.linalg.expm(1j * h * t)
    return u @ c0 @ u.conj().T


def dense_observables(N, N_b, g, g_c, defect, t):
    c = dense_correlation(N, N_b, g, g_c, defect, t)
    m = np.linalg.eigvalsh(c[:N, :N]).real
    m = np.clip(m, 0.0, 1.0)
    inner = m[(m > 1e-12) & (m < 1 - 1e-12)]
    s = float(-np.sum(inner * np.log(inner) + (1 - inner) * np.log(1 - inner)))
    bond = g if defect == "density" else g_c
    # <c_0^dag c_1> sits at (row of site 0, row of site 1)
    current = 2.0 * bond * c[N - 1, N].imag
    return {
        "I": float(current),
        "S": s,
        "kappa2": float(np.sum(m * (1 - m))),
        "N_sys": float(np.trace(c[:N, :N]).real),
        "rho": np.diag(c).real.copy(),
        "spectrum": np.sort(m)[::-1],
    }


def dense_orbitals(N, N_b, g, g_c, defect, t):
    """``exp(iht)`` restricted to the initially filled columns."""
    h = dense_hamiltonian(N, N_b, g, g_c, defect)
    return scipy.linalg.expm(1j * h * t)[:, :N]
