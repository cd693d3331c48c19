"""Scenario execution, table comparison and finite-size collapse."""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import PchipInterpolator

from .. import asymptotics as asym
from ..errors import AlignmentError, DomainError, ResourceError
from ..exact import ExactPropagator, entropy_from_cumulant
from ..hydro import (
    Region,
    hydro_current,
    hydro_density,
    hydro_particle_number,
    hydro_region_entropy,
    initial_occupation,
)
from ..model import DefectKind, page_time
from .config import ScenarioConfig
from .tables import SeriesTable, emit_csv

__all__ = [
    "ScenarioResult",
    "ComparisonReport",
    "CollapseReport",
    "run_scenario",
    "compare_series",
    "collapse_check",
    "worker_count",
    "profile_filename",
]

ENTROPY_FILE = "page_entropy.csv"
CURRENT_FILE = "current.csv"


def worker_count() -> int:
    """Worker threads from ``PAGECURVE_THREADS`` (unset or 0: one per CPU)."""
    raw = os.environ.get("PAGECURVE_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ResourceError(f"PAGECURVE_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ResourceError("PAGECURVE_THREADS must be >= 0")
    return n if n > 0 else (os.cpu_count() or 1)


def _pmap(fn, items, workers: int) -> list:
    # ordered map, so output does not depend on scheduling
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def profile_filename(t: float) -> str:
    return f"profiles_t{t:g}.csv"


@dataclass
class ScenarioResult:
    series: dict[str, SeriesTable]
    entropy: SeriesTable
    current: SeriesTable
    profiles: dict[float, SeriesTable]
    files: list[Path] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)


def _metadata(config: ScenarioConfig, table: str, extra=None) -> dict[str, str]:
    spec = config.model
    meta = {
        "table": table,
        "t_page": repr(page_time(spec)),
        "validity_limit": repr(0.9 * spec.N_b / spec.fermi_velocity),
    }
    if extra:
        meta.update(extra)
    return meta


def _exact_series(config: ScenarioConfig, workers: int) -> tuple[dict[str, np.ndarray], ExactPropagator]:
    spec = config.model
    if spec.dim > config.max_dim:
        raise ResourceError(
            f"exact engine needs a {spec.dim}x{spec.dim} matrix, above limits.max_dim={config.max_dim}"
        )
    prop = ExactPropagator(spec)
    times = config.times
    if times.max() > prop.validity_limit():
        warnings.warn(
            f"exact series extends past t={prop.validity_limit():g}; those rows are flagged",
            stacklevel=3,
        )
    rows = _pmap(prop.observables, list(times), workers)
    cols = {
        "t": times,
        "I_exact": np.array([r["I"] for r in rows]),
        "S_exact": np.array([r["S"] for r in rows]),
        "kappa2": np.array([r["kappa2"] for r in rows]),
        "S_kappa2": np.array([entropy_from_cumulant(r["kappa2"]) for r in rows]),
        "N_sys_exact": np.array([r["N_sys"] for r in rows]),
        "in_window": (times <= prop.validity_limit()).astype(float),
    }
    return cols, prop


def _hydro_series(config: ScenarioConfig, workers: int) -> dict[str, np.ndarray]:
    spec, quad = config.model, config.quad

    def one(t):
        if config.current_mode.value == "derivative" and t >= config.derivative_dt:
            cur = hydro_current(spec, t, quad, mode="derivative", dt=config.derivative_dt)
        else:
            cur = hydro_current(spec, t, quad)
        return (
            cur,
            hydro_region_entropy(spec, t, Region.SYSTEM, quad),
            hydro_region_entropy(spec, t, Region.RESERVOIR, quad),
            hydro_particle_number(spec, t, quad),
        )

    vals = np.array(_pmap(one, list(config.times), workers)).reshape(-1, 4)
    return {
        "t": config.times,
        "I_hydro": vals[:, 0],
        "S_hydro_sys": vals[:, 1],
        "S_hydro_res": vals[:, 2],
        "N_sys_hydro": vals[:, 3],
    }


def _asymptotic_series(config: ScenarioConfig, notes: list[str]) -> dict[str, np.ndarray]:
    spec, quad = config.model, config.quad
    t = config.times
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        plateau = asym.early_current_closed(spec, quad)
    notes.extend(str(w.message) for w in caught)
    alpha = asym.early_entropy_rate(spec, quad)
    t_page = page_time(spec)
    early = t <= t_page
    cols = {
        "t": t,
        "I_early": np.where(early & (t > 0), plateau, np.where(t == 0, 0.0, math.nan)),
        "S_early": np.where(early, alpha * t, math.nan),
    }
    # long-time forms are only reported from the Page time on
    late = t >= t_page
    if spec.defect is DefectKind.CONFORMAL and spec.lam < 1:
        cols["I_longtime"] = np.array([asym.conformal_longtime_current(spec, x) if p else math.nan for x, p in zip(t, late)])
        cols["S_longtime"] = np.array(
            [asym.conformal_longtime_entropy(spec, x, quad) if p else math.nan for x, p in zip(t, late)]
        )
    else:
        cols["I_longtime"] = np.array([asym.longtime_current(spec, x, quad) if p else math.nan for x, p in zip(t, late)])
    return cols


def _profile(config: ScenarioConfig, t: float, prop: ExactPropagator | None) -> SeriesTable:
    spec = config.model
    sites = spec.sites.astype(float)
    x = sites - 0.5
    cols = {"site": sites, "x": x}
    if prop is not None:
        cols["rho_exact"] = prop.density_profile(t)
    if "hydro" in config.engines:
        rho = np.zeros_like(x)
        if t == 0:
            rho = initial_occupation(x, spec.N)
        else:
            reach = x <= spec.fermi_velocity * t + config.quad.margin
            rho[reach] = hydro_density(spec, x[reach], t, config.quad)
        cols["rho_hydro"] = rho
    if "asymptotic" in config.engines:
        if t == 0:
            closed = initial_occupation(x, spec.N)
        elif spec.defect is DefectKind.CONFORMAL:
            closed = np.array([asym.conformal_density_alltime(spec, xi, t) for xi in x])
        elif spec.fermi_velocity * t <= spec.N:
            closed = np.array([asym.early_density_closed(spec, xi, t) for xi in x])
        else:
            closed = None
        if closed is not None:
            cols["rho_closed"] = closed
    return SeriesTable(cols, _metadata(config, "profile", {"t": repr(float(t))}), tuple(config.lines()))


def _merge(config, name: str, parts: list[dict], keys: tuple[str, ...]) -> SeriesTable:
    cols = {"t": config.times}
    for part in parts:
        for key in keys:
            if key in part:
                cols[key] = part[key]
    return SeriesTable(cols, _metadata(config, name), tuple(config.lines()))


def run_scenario(config: ScenarioConfig, write: bool = True, output_dir=None) -> ScenarioResult:
    """Run every configured engine on the config's time grid.

    Writes ``page_entropy.csv``, ``current.csv``, ``series_<engine>.csv``
    and one ``profiles_t<T>.csv`` per profile time into the output
    directory when ``write`` is true.
    """
    workers = worker_count()
    notes: list[str] = []
    series: dict[str, SeriesTable] = {}
    parts: list[dict] = []
    prop = None
    if "exact" in config.engines:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            cols, prop = _exact_series(config, workers)
        notes.extend(str(w.message) for w in caught)
        parts.append(cols)
        series["exact"] = SeriesTable(cols, _metadata(config, "series_exact"), tuple(config.lines()))
    if "hydro" in config.engines:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            cols = _hydro_series(config, workers)
        notes.extend(str(w.message) for w in caught)
        parts.append(cols)
        series["hydro"] = SeriesTable(cols, _metadata(config, "series_hydro"), tuple(config.lines()))
    if "asymptotic" in config.engines:
        cols = _asymptotic_series(config, notes)
        parts.append(cols)
        series["asymptotic"] = SeriesTable(cols, _metadata(config, "series_asymptotic"), tuple(config.lines()))

    entropy = _merge(
        config,
        "page_entropy",
        parts,
        ("S_exact", "kappa2", "S_kappa2", "S_hydro_sys", "S_hydro_res", "S_early", "S_longtime", "in_window"),
    )
    current = _merge(config, "current", parts, ("I_exact", "I_hydro", "I_early", "I_longtime", "in_window"))
    profiles = {float(t): _profile(config, float(t), prop) for t in config.profile_times}

    result = ScenarioResult(series, entropy, current, profiles, notes=notes)
    if write:
        out = Path(output_dir) if output_dir is not None else config.output_dir
        result.files.append(emit_csv(entropy, out / ENTROPY_FILE))
        result.files.append(emit_csv(current, out / CURRENT_FILE))
        for engine, table in series.items():
            result.files.append(emit_csv(table, out / f"series_{engine}.csv"))
        for t, table in profiles.items():
            result.files.append(emit_csv(table, out / profile_filename(t)))
    return result


# --------------------------------------------------------------------------
# comparisons
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ComparisonReport:
    """Deviation of ``b[other]`` from ``a[observable]`` on a shared time grid.

    ``max_rel`` is relative to the peak of ``|a[observable]|`` in the
    compared window.  Rows beyond the exact engine's validity limit are
    included and listed in ``flagged_times``; ``max_abs_valid`` excludes
    them.
    """

    observable: str
    other: str
    max_abs: float
    max_rel: float
    t_at_max: float
    peak: float
    max_abs_valid: float
    flagged_times: tuple[float, ...]
    t: np.ndarray = field(repr=False)
    signed_deviation: np.ndarray = field(repr=False)

    @property
    def deviation(self) -> np.ndarray:
        return np.abs(self.signed_deviation)

    @property
    def n_flagged(self) -> int:
        return len(self.flagged_times)

    def monotone_increasing(self, t_lo: float = -math.inf, t_hi: float = math.inf, signed: bool = False) -> bool:
        sel = (self.t >= t_lo) & (self.t <= t_hi)
        d = self.signed_deviation[sel] if signed else self.deviation[sel]
        return bool(d.size >= 2 and np.all(np.diff(d) > 0))

    def lines(self) -> list[str]:
        return [
            f"observable = {self.observable}",
            f"against = {self.other}",
            f"max_abs = {self.max_abs:.17g}",
            f"max_rel = {self.max_rel:.17g}",
            f"t_at_max = {self.t_at_max:.17g}",
            f"peak = {self.peak:.17g}",
            f"max_abs_valid = {self.max_abs_valid:.17g}",
            f"flagged = {self.n_flagged}",
        ]


def _validity_limit(*tables: SeriesTable) -> float:
    for table in tables:
        value = table.metadata.get("validity_limit")
        if value is not None:
            return float(value)
    return math.inf


def compare_series(
    a: SeriesTable,
    b: SeriesTable,
    observable: str,
    other: str | None = None,
    t_min: float = -math.inf,
    t_max: float = math.inf,
    validity_limit: float | None = None,
) -> ComparisonReport:
    """Compare one column of ``a`` with one column of ``b`` (same name by default).

    Raises
    ------
    AlignmentError
        The tables do not carry identical ``t`` columns.  Nothing is
        interpolated.
    """
    other = other or observable
    if "t" not in a or "t" not in b:
        raise AlignmentError("both tables need a 't' column")
    ta, tb = a["t"], b["t"]
    if ta.shape != tb.shape or not np.array_equal(ta, tb):
        raise AlignmentError(f"time grids differ ({ta.size} vs {tb.size} samples)")
    sel = (ta >= t_min) & (ta <= t_max)
    if not np.any(sel):
        raise DomainError(f"no samples in [{t_min}, {t_max}]")
    t = ta[sel]
    x = a[observable][sel]
    y = b[other][sel]
    signed = y - x
    dev = np.abs(signed)
    limit = _validity_limit(a, b) if validity_limit is None else float(validity_limit)
    flagged = t > limit
    i = int(np.nanargmax(dev))
    peak = float(np.nanmax(np.abs(x)))
    valid = dev[~flagged]
    report = ComparisonReport(
        observable=observable,
        other=other,
        max_abs=float(dev[i]),
        max_rel=float(dev[i] / peak) if peak > 0 else (0.0 if dev[i] == 0 else math.inf),
        t_at_max=float(t[i]),
        peak=peak,
        max_abs_valid=float(valid.max()) if valid.size else math.nan,
        flagged_times=tuple(float(v) for v in t[flagged]),
        t=t,
        signed_deviation=signed,
    )
    return report


@dataclass(frozen=True)
class CollapseReport:
    """Spread of ``y/N`` against ``t/N`` across system sizes."""

    observable: str
    sizes: tuple[int, ...]
    tau: np.ndarray = field(repr=False)
    curves: dict[int, np.ndarray] = field(repr=False)
    sup_distance: float = 0.0
    peak: float = 0.0

    @property
    def relative(self) -> float:
        return self.sup_distance / self.peak if self.peak > 0 else 0.0

    def lines(self) -> list[str]:
        return [
            f"observable = {self.observable}",
            f"sizes = {', '.join(map(str, self.sizes))}",
            f"tau_range = {self.tau[0]:.17g}, {self.tau[-1]:.17g}",
            f"sup_distance = {self.sup_distance:.17g}",
            f"peak = {self.peak:.17g}",
            f"relative = {self.relative:.17g}",
        ]


def _size_of(table: SeriesTable) -> int:
    value = table.config_value("model.N")
    if value is None:
        raise DomainError("table carries no model.N in its config echo")
    return int(value)


def collapse_check(tables, observable: str = "S_hydro_sys", n_grid: int = 401) -> CollapseReport:
    """Resample ``y/N`` on a common grid in ``t/N`` and report the sup spread.

    ``tables`` is a mapping ``N -> SeriesTable`` or a sequence of tables whose
    config echo names ``model.N``.  Resampling is monotone cubic (PCHIP).
    """
    if isinstance(tables, dict):
        items = [(int(n), tab) for n, tab in tables.items()]
    else:
        items = [(_size_of(tab), tab) for tab in tables]
    sizes = sorted({n for n, _ in items})
    if len(sizes) < 2:
        raise DomainError("collapse needs at least two distinct system sizes")
    if len(sizes) != len(items):
        raise DomainError("each system size may appear once")
    items.sort()
    lo = max(tab["t"][0] / n for n, tab in items)
    hi = min(tab["t"][-1] / n for n, tab in items)
    if not hi > lo or any(len(tab) < 2 for _, tab in items):
        raise DomainError(f"insufficient overlap in t/N: [{lo:g}, {hi:g}]")
    tau = np.linspace(lo, hi, n_grid)
    curves = {}
    for n, tab in items:
        interp = PchipInterpolator(tab["t"] / n, tab[observable] / n)
        curves[n] = interp(tau)
    stack = np.vstack([curves[n] for n in sizes])
    spread = float(np.max(stack.max(axis=0) - stack.min(axis=0)))
    peak = float(np.max(np.abs(stack)))
    return CollapseReport(observable, tuple(sizes), tau, curves, spread, peak)
