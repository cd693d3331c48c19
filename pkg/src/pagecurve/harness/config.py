"""Scenario configuration files.

Grammar, one entry per line::

    # comment
    model.N = 80
    model.defect = conformal
    engines = exact, hydro
    times.start = 0
    times.end = 2000
    times.dt = 1

Blank lines and lines whose first non-blank character is ``#`` are ignored.
Keys are dotted identifiers, each key may appear once, values run to the end
of the line and lists are comma separated.  ``times`` is either an explicit
list or the triple ``times.start``/``times.end``/``times.dt`` (end included).

Recognised keys and defaults:

==========================  ===================  ================================
key                         default              meaning
==========================  ===================  ================================
model.N                     40                   filled box sites
model.N_b                   1024                 reservoir sites
model.g                     0.5                  bulk hopping
model.g_c                   0.4                  junction coupling
model.defect                conformal            conformal | hopping | density
engines                     exact, hydro         subset of exact, hydro, asymptotic
times / times.*             (required)           time grid
profile_times               (empty)              times for spatial profiles
quadrature.k_nodes          64                   Gauss-Legendre order per panel
quadrature.x_nodes_per_unit 2.0                  x-grid route resolution
quadrature.margin           4.0                  reservoir cut beyond the front
quadrature.rtol             1e-11                adaptive tolerance
quadrature.max_depth        40                   bisection cap
current.mode                flux                 flux | derivative (hydro)
current.dt                  0.5                  step of the derivative mode
output_dir                  pagecurve-out        where CSV files go
limits.max_dim              20000                cap on N + N_b for exact runs
==========================  ===================  ================================
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ConfigError, ParameterError
from ..hydro import CurrentMode, QuadratureSpec
from ..model import DefectKind, ModelSpec

__all__ = ["ScenarioConfig", "parse_config", "load_config", "ENGINES"]

ENGINES = ("exact", "hydro", "asymptotic")
_KEY = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*(\.[A-Za-z_][A-Za-z0-9_]*)*$")

_DEFAULTS = {
    "model.N": "40",
    "model.N_b": "1024",
    "model.g": "0.5",
    "model.g_c": "0.4",
    "model.defect": "conformal",
    "engines": "exact, hydro",
    "profile_times": "",
    "quadrature.k_nodes": "64",
    "quadrature.x_nodes_per_unit": "2.0",
    "quadrature.margin": "4.0",
    "quadrature.rtol": "1e-11",
    "quadrature.max_depth": "40",
    "current.mode": "flux",
    "current.dt": "0.5",
    "output_dir": "pagecurve-out",
    "limits.max_dim": "20000",
}
_TIME_RANGE = ("times.start", "times.end", "times.dt")
_KNOWN = set(_DEFAULTS) | {"times", *_TIME_RANGE}


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully resolved scenario; ``entries`` is the echo written into outputs."""

    model: ModelSpec
    engines: tuple[str, ...]
    times: np.ndarray
    profile_times: tuple[float, ...]
    quad: QuadratureSpec
    current_mode: CurrentMode
    derivative_dt: float
    output_dir: Path
    max_dim: int
    entries: dict[str, str] = field(repr=False)

    def lines(self) -> list[str]:
        """``key = value`` lines that reproduce this config."""
        return [f"{k} = {v}" for k, v in sorted(self.entries.items())]

    def with_overrides(self, overrides) -> "ScenarioConfig":
        return parse_config("\n".join(self.lines()), overrides)


def _split_line(raw: str, lineno: int) -> tuple[str, str] | None:
    line = raw.strip()
    if not line or line.startswith("#"):
        return None
    if "=" not in line:
        raise ConfigError("expected 'key = value'", line=lineno)
    key, value = (part.strip() for part in line.split("=", 1))
    if not _KEY.match(key):
        raise ConfigError("malformed key", line=lineno, key=key)
    return key, value


def _apply(entries: dict, lines: dict, key: str, value: str, lineno, origin_dupes: bool) -> None:
    if key not in _KNOWN:
        raise ConfigError("unknown key", line=lineno, key=key)
    if origin_dupes and key in entries:
        raise ConfigError(f"duplicate key (first set on line {lines[key]})", line=lineno, key=key)
    # an explicit list and a range are alternatives; the later one wins
    if key == "times":
        for k in _TIME_RANGE:
            entries.pop(k, None)
    elif key in _TIME_RANGE:
        entries.pop("times", None)
    entries[key] = value
    lines[key] = lineno


def _as_float(entries, lines, key) -> float:
    try:
        value = float(entries[key])
    except ValueError:
        raise ConfigError(f"not a number: {entries[key]!r}", line=lines.get(key), key=key) from None
    if not math.isfinite(value):
        raise ConfigError("must be finite", line=lines.get(key), key=key)
    return value


def _as_int(entries, lines, key) -> int:
    text = entries[key]
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"not an integer: {text!r}", line=lines.get(key), key=key) from None


def _float_list(entries, lines, key) -> list[float]:
    text = entries[key].strip()
    if not text:
        return []
    out = []
    for item in text.split(","):
        try:
            value = float(item)
        except ValueError:
            raise ConfigError(f"not a number: {item.strip()!r}", line=lines.get(key), key=key) from None
        if not math.isfinite(value):
            raise ConfigError("must be finite", line=lines.get(key), key=key)
        out.append(value)
    return out


def _time_grid(entries, lines) -> np.ndarray:
    if "times" in entries:
        times = np.asarray(_float_list(entries, lines, "times"))
        where = lines.get("times")
    else:
        missing = [k for k in _TIME_RANGE if k not in entries]
        if len(missing) == 3:
            raise ConfigError("no time grid: set 'times' or times.start/end/dt")
        if missing:
            raise ConfigError(f"incomplete time range, missing {', '.join(missing)}")
        start, end, dt = (_as_float(entries, lines, k) for k in _TIME_RANGE)
        where = lines.get("times.dt")
        if dt <= 0:
            raise ConfigError("must be positive", line=where, key="times.dt")
        if end < start:
            raise ConfigError("times.end before times.start", line=lines.get("times.end"), key="times.end")
        n = int(math.floor((end - start) / dt + 1e-9)) + 1
        times = start + dt * np.arange(n)
    if times.size == 0:
        raise ConfigError("time grid is empty", line=where, key="times")
    if np.any(times < 0):
        raise ConfigError("times must be non-negative", line=where, key="times")
    if np.any(np.diff(times) <= 0):
        raise ConfigError("times must be strictly increasing", line=where, key="times")
    return times


def parse_config(text: str, overrides=()) -> ScenarioConfig:
    """Parse config ``text`` and apply ``overrides`` (``"key=value"`` strings)."""
    entries: dict[str, str] = {}
    lines: dict[str, int | None] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        kv = _split_line(raw, lineno)
        if kv is not None:
            _apply(entries, lines, *kv, lineno, origin_dupes=True)
    for item in overrides:
        kv = _split_line(item, None) if "=" in item else None
        if kv is None:
            raise ConfigError(f"override {item!r} is not 'key=value'")
        _apply(entries, lines, *kv, None, origin_dupes=False)
    for key, value in _DEFAULTS.items():
        entries.setdefault(key, value)

    try:
        model = ModelSpec(
            N=_as_int(entries, lines, "model.N"),
            N_b=_as_int(entries, lines, "model.N_b"),
            g=_as_float(entries, lines, "model.g"),
            g_c=_as_float(entries, lines, "model.g_c"),
            defect=DefectKind.parse(entries["model.defect"]),
        )
    except ConfigError:
        raise
    except ParameterError as exc:
        raise ConfigError(str(exc), key="model") from exc

    engines = tuple(e.strip().lower() for e in entries["engines"].split(",") if e.strip())
    bad = [e for e in engines if e not in ENGINES]
    if bad or not engines:
        raise ConfigError(f"engines must be a non-empty subset of {ENGINES}", line=lines.get("engines"), key="engines")
    if len(set(engines)) != len(engines):
        raise ConfigError("repeated engine", line=lines.get("engines"), key="engines")
    engines = tuple(e for e in ENGINES if e in engines)

    times = _time_grid(entries, lines)
    profile_times = tuple(_float_list(entries, lines, "profile_times"))
    if any(t < 0 for t in profile_times):
        raise ConfigError("profile times must be non-negative", line=lines.get("profile_times"), key="profile_times")

    try:
        quad = QuadratureSpec(
            k_nodes=_as_int(entries, lines, "quadrature.k_nodes"),
            x_nodes_per_unit=_as_float(entries, lines, "quadrature.x_nodes_per_unit"),
            margin=_as_float(entries, lines, "quadrature.margin"),
            rtol=_as_float(entries, lines, "quadrature.rtol"),
            max_depth=_as_int(entries, lines, "quadrature.max_depth"),
        )
    except ConfigError:
        raise
    except ParameterError as exc:
        raise ConfigError(str(exc), key="quadrature") from exc

    try:
        mode = CurrentMode(entries["current.mode"].strip().lower())
    except ValueError:
        raise ConfigError("must be flux or derivative", line=lines.get("current.mode"), key="current.mode") from None
    dt = _as_float(entries, lines, "current.dt")
    if dt <= 0:
        raise ConfigError("must be positive", line=lines.get("current.dt"), key="current.dt")
    max_dim = _as_int(entries, lines, "limits.max_dim")
    if max_dim < 2:
        raise ConfigError("must be at least 2", line=lines.get("limits.max_dim"), key="limits.max_dim")
    output_dir = entries["output_dir"].strip()
    if not output_dir:
        raise ConfigError("must not be empty", line=lines.get("output_dir"), key="output_dir")

    return ScenarioConfig(
        model=model,
        engines=engines,
        times=times,
        profile_times=profile_times,
        quad=quad,
        current_mode=mode,
        derivative_dt=dt,
        output_dir=Path(output_dir),
        max_dim=max_dim,
        entries=dict(entries),
    )


def load_config(path, overrides=()) -> ScenarioConfig:
    """Read a config file, or the config echo of a CSV written by a run."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    if path.suffix.lower() == ".csv":
        from .tables import config_text_from_csv

        text = config_text_from_csv(text)
    return parse_config(text, overrides)
