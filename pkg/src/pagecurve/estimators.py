"""scikit-learn style front-ends.

``ExactDynamics`` and ``HydroDynamics`` are transformers: ``fit`` prepares
the model (diagonalisation for the exact engine), ``transform`` maps a column
of times to a matrix of observables.  ``PowerLawTail`` is a regressor for
``y = A t**(-a)``.
"""

from __future__ import annotations

import warnings

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .asymptotics import fit_tail
from .exact import ExactPropagator
from .hydro import QuadratureSpec, hydro_current, hydro_particle_number, hydro_region_entropy
from .validation import check_model, check_positive_series, check_times

__all__ = ["ExactDynamics", "HydroDynamics", "PowerLawTail"]


class _ModelParams:
    def _spec(self):
        return check_model(self.N, self.N_b, self.g, self.g_c, self.defect)


class ExactDynamics(_ModelParams, TransformerMixin, BaseEstimator):
    """Exact lattice observables as a transformer over times.

    Examples
    --------
    >>> est = ExactDynamics(N=4, N_b=16).fit()
    >>> est.transform([[0.0]]).tolist()
    [[0.0, 0.0, 0.0, 4.0]]
    """

    feature_names = ("I", "S", "kappa2", "N_sys")

    def __init__(self, N=40, N_b=1024, g=0.5, g_c=0.4, defect="conformal", warn_validity=True):
        self.N = N
        self.N_b = N_b
        self.g = g
        self.g_c = g_c
        self.defect = defect
        self.warn_validity = warn_validity

    def fit(self, X=None, y=None):
        self.spec_ = self._spec()
        self.propagator_ = ExactPropagator(self.spec_)
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "propagator_")
        t = check_times(X, strictly_increasing=False)
        cols = self.propagator_.series(t, warn=self.warn_validity)
        return np.column_stack([cols[name] for name in self.feature_names])

    def get_feature_names_out(self, input_features=None):
        return np.asarray(self.feature_names, dtype=object)


class HydroDynamics(_ModelParams, TransformerMixin, BaseEstimator):
    """Hydrodynamic observables: current, box and reservoir entropy, box particle number."""

    feature_names = ("I", "S_sys", "S_res", "N_sys")

    def __init__(self, N=40, N_b=1024, g=0.5, g_c=0.4, defect="conformal", k_nodes=64, rtol=1e-11):
        self.N = N
        self.N_b = N_b
        self.g = g
        self.g_c = g_c
        self.defect = defect
        self.k_nodes = k_nodes
        self.rtol = rtol

    def fit(self, X=None, y=None):
        self.spec_ = self._spec()
        self.quad_ = QuadratureSpec(k_nodes=self.k_nodes, rtol=self.rtol)
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "quad_")
        t = check_times(X, strictly_increasing=False)
        s, q = self.spec_, self.quad_
        out = np.empty((t.size, 4))
        for i, ti in enumerate(t):
            out[i] = (
                hydro_current(s, ti, q),
                hydro_region_entropy(s, ti, "system", q),
                hydro_region_entropy(s, ti, "reservoir", q),
                hydro_particle_number(s, ti, q),
            )
        return out

    def get_feature_names_out(self, input_features=None):
        return np.asarray(self.feature_names, dtype=object)


class PowerLawTail(RegressorMixin, BaseEstimator):
    """Log-log least-squares fit of ``y = prefactor * t**(-exponent)``.

    ``window`` restricts the fit to ``t_lo <= t <= t_hi``; ``None`` uses all
    samples.  ``score`` is the usual R^2, computed on ``y`` itself.
    """

    def __init__(self, window=None, min_samples=8):
        self.window = window
        self.min_samples = min_samples

    def fit(self, X, y):
        t = check_times(X, strictly_increasing=False)
        t, y = np.asarray(t), np.asarray(y, dtype=float).ravel()
        if self.window is None:
            t_fit, y_fit = check_positive_series(t, y)
        else:
            t_fit, y_fit = t, y
        fit = fit_tail(t_fit, y_fit, window=self.window, min_samples=self.min_samples)
        self.exponent_ = fit.exponent
        self.prefactor_ = fit.prefactor
        self.residual_ = fit.residual
        self.n_samples_fit_ = fit.n_samples
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "exponent_")
        t = check_times(X, strictly_increasing=False)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            return self.prefactor_ * t ** (-self.exponent_)
