"""Argument checks shared by the estimators and the harness."""

from __future__ import annotations

import numpy as np

from .errors import DomainError, ParameterError
from .model import ModelSpec

__all__ = ["check_times", "check_model", "check_positive_series"]


def check_times(times, *, allow_empty: bool = False, strictly_increasing: bool = True) -> np.ndarray:
    """Return ``times`` as a 1-D float array of finite, non-negative values.

    A column vector ``(n, 1)`` is accepted and flattened, matching the
    feature-matrix convention of the estimators.
    """
    t = np.asarray(times, dtype=float)
    if t.ndim == 2 and t.shape[1] == 1:
        t = t[:, 0]
    if t.ndim == 0:
        t = t[None]
    if t.ndim != 1:
        raise DomainError(f"times must be 1-D, got shape {t.shape}")
    if not allow_empty and t.size == 0:
        raise DomainError("times must be non-empty")
    if not np.all(np.isfinite(t)):
        raise DomainError("times must be finite")
    if np.any(t < 0):
        raise DomainError("times must be non-negative")
    if strictly_increasing and t.size > 1 and np.any(np.diff(t) <= 0):
        raise DomainError("times must be strictly increasing")
    return t


def check_model(N, N_b, g, g_c, defect) -> ModelSpec:
    """Build a :class:`ModelSpec`, turning type errors into ``ParameterError``."""
    try:
        return ModelSpec(N=N, N_b=N_b, g=g, g_c=g_c, defect=defect)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ParameterError):
            raise
        raise ParameterError(str(exc)) from exc


def check_positive_series(t, y) -> tuple[np.ndarray, np.ndarray]:
    t = np.asarray(t, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if t.shape != y.shape:
        raise DomainError(f"t and y differ in length: {t.size} vs {y.size}")
    if np.any(t <= 0) or np.any(y <= 0):
        raise DomainError("power-law fit needs positive t and y")
    return t, y
