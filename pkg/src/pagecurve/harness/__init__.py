"""Scenario configs, CSV tables and the command line front-end."""

from .config import ENGINES, ScenarioConfig, load_config, parse_config
from .runner import (
    CollapseReport,
    ComparisonReport,
    ScenarioResult,
    collapse_check,
    compare_series,
    run_scenario,
)
from .tables import SeriesTable, emit_csv, read_csv

__all__ = [
    "ENGINES",
    "ScenarioConfig",
    "load_config",
    "parse_config",
    "ScenarioResult",
    "ComparisonReport",
    "CollapseReport",
    "run_scenario",
    "compare_series",
    "collapse_check",
    "SeriesTable",
    "emit_csv",
    "read_csv",
]
