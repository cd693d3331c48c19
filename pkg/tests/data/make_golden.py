"""Regenerate the golden files from the dense oracle.

Run once from the repository root::

    python3 tests/data/make_golden.py
"""

import csv
import sys
from pathlib import Path

import numpy as np

HERE = Path(__file__).resolve().parent
sys.path.insert(0, str(HERE.parent))

from oracles import dense_observables, dense_orbitals  # noqa: E402


def main():
    N, N_b, g, g_c = 4, 16, 0.5, 0.4
    a = dense_orbitals(N, N_b, g, g_c, "conformal", 8.0)
    spec8 = dense_observables(N, N_b, g, g_c, "conformal", 8.0)
    np.savez(HERE / "golden_N4_Nb16_t8.npz", orbitals=a, spectrum=spec8["spectrum"], rho=spec8["rho"])

    times = 0.5 * np.arange(17)
    with open(HERE / "golden_smoke.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "I", "S", "kappa2", "N_sys"])
        for t in times:
            o = dense_observables(N, N_b, g, g_c, "conformal", float(t))
            w.writerow(["%.17g" % v for v in (t, o["I"], o["S"], o["kappa2"], o["N_sys"])])


if __name__ == "__main__":
    main()
