"""Piecewise Gauss-Legendre quadrature for integrands with known kinks.

The hydrodynamic integrands are smooth between breakpoints that can be
listed in advance (where a step-function argument changes sign), so each
piece gets a fixed-order rule; a piece is bisected only when the rule on
the whole piece and on its two halves disagree.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=16)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@dataclass
class QuadResult:
    value: float
    error: float
    converged: bool
    pieces: int


def _map_nodes(a: np.ndarray, b: np.ndarray, order: int):
    x, w = gauss_legendre(order)
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    nodes = mid[:, None] + half[:, None] * x[None, :]
    weights = half[:, None] * w[None, :]
    return nodes, weights


def clean_breakpoints(lo: float, hi: float, points) -> np.ndarray:
    """Sorted unique breakpoints inside ``[lo, hi]``, endpoints included."""
    pts = np.asarray(list(points) if not isinstance(points, np.ndarray) else points, dtype=float)
    pts = pts[np.isfinite(pts)]
    pts = pts[(pts > lo) & (pts < hi)]
    pts = np.concatenate(([lo], np.sort(pts), [hi]))
    span = hi - lo
    keep = np.concatenate(([True], np.diff(pts) > 1e-14 * max(span, 1.0)))
    pts = pts[keep]
    pts[-1] = hi
    return pts


def integrate_piecewise(
    f,
    breakpoints,
    order: int = 64,
    rtol: float = 1e-11,
    atol: float = 1e-15,
    max_depth: int = 40,
    max_pieces: int = 100_000,
) -> QuadResult:
    """Integrate vectorised ``f`` over ``[breakpoints[0], breakpoints[-1]]``.

    ``f`` receives a 2-D array of nodes and must return an array of the same
    shape.  Intervals between consecutive breakpoints are treated as smooth.
    Refinement stops, with ``converged=False``, at ``max_depth`` bisections,
    when more than ``max_pieces`` pieces are pending, or on a non-finite
    piece (whose value then propagates into the result).
    """
    pts = np.asarray(breakpoints, dtype=float)
    if pts.size < 2:
        return QuadResult(0.0, 0.0, True, 0)
    a = pts[:-1]
    b = pts[1:]
    span = float(pts[-1] - pts[0])
    total = 0.0
    err_total = 0.0
    converged = True
    accepted = 0
    scale = None
    for depth in range(max_depth + 1):
        if a.size == 0:
            break
        m = 0.5 * (a + b)
        lo = np.concatenate((a, a, m))
        hi = np.concatenate((b, m, b))
        nodes, weights = _map_nodes(lo, hi, order)
        vals = np.asarray(f(nodes), dtype=float)
        sums = np.sum(vals * weights, axis=1)
        n = a.size
        whole = sums[:n]
        halves = sums[n : 2 * n] + sums[2 * n :]
        err = np.abs(whole - halves)
        if scale is None:
            scale = max(abs(float(np.sum(halves))), np.sum(np.abs(halves)) * 1e-3, atol)
        allowed = np.maximum(rtol * np.abs(halves), np.maximum(rtol * scale * (b - a) / max(span, 1e-300), atol))
        ok = err <= allowed
        finite = np.isfinite(halves) & np.isfinite(whole)
        if not np.all(finite):
            ok |= ~finite
            converged = False
        if depth == max_depth or 2 * np.count_nonzero(~ok) > max_pieces:
            ok[:] = True
            if np.any(err > allowed):
                converged = False
        total += float(np.sum(halves[ok]))
        err_total += float(np.sum(err[ok]))
        accepted += int(np.count_nonzero(ok))
        bad = ~ok
        if not np.any(bad):
            break
        # bisect the rejected pieces
        ab, bb, mb = a[bad], b[bad], m[bad]
        a = np.concatenate((ab, mb))
        b = np.concatenate((mb, bb))
    return QuadResult(total, err_total, converged, accepted)
