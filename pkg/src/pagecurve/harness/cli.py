"""Command line entry point.

``pagecurve run``       run a scenario and write CSV tables
``pagecurve compare``   deviation between two columns on a shared time grid
``pagecurve fit``       power-law tail exponent of one column
``pagecurve collapse``  finite-size collapse of ``y/N`` against ``t/N``

Every subcommand takes ``--config`` and repeatable ``--set key=value``
overrides.  ``compare``/``fit``/``collapse`` can read CSV files written by
``run`` (``--input``) instead of running the scenario.

Exit status: 0 on success, 2 on invalid input, 3 on numerical failure.
"""

from __future__ import annotations

import argparse
import sys
import warnings

import numpy as np

from .. import __version__
from ..asymptotics import fit_tail
from ..errors import (
    AlignmentError,
    DomainError,
    NumericError,
    ParameterError,
    RangeError,
    UnsupportedDefectError,
)
from ..model import page_time
from .config import load_config
from .runner import collapse_check, compare_series, run_scenario
from .tables import SeriesTable, read_csv

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERIC = 3


def _common(p: argparse.ArgumentParser, config_required: bool) -> None:
    p.add_argument("--config", required=config_required, help="scenario config file (or a CSV with a config echo)")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE", help="override a config key")
    p.add_argument("--output-dir", help="directory for CSV output (overrides output_dir)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pagecurve", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"pagecurve {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a scenario and write CSV tables")
    _common(p, config_required=True)

    p = sub.add_parser("compare", help="compare two columns on a shared time grid")
    _common(p, config_required=False)
    p.add_argument("--input", action="append", default=[], help="CSV file (one or two)")
    p.add_argument("--observable", required=True)
    p.add_argument("--against", help="column of the second table (default: same name)")
    p.add_argument("--t-min", type=float, default=-np.inf)
    p.add_argument("--t-max", type=float, default=np.inf)

    p = sub.add_parser("fit", help="fit a power-law tail to one column")
    _common(p, config_required=False)
    p.add_argument("--input", help="CSV file")
    p.add_argument("--observable", required=True)
    p.add_argument("--window", required=True, help="t_lo,t_hi")
    p.add_argument("--page-units", action="store_true", help="window is given in units of the Page time")

    p = sub.add_parser("collapse", help="check y/N against t/N across system sizes")
    _common(p, config_required=False)
    p.add_argument("--input", action="append", default=[], help="CSV file per system size")
    p.add_argument("--sizes", help="comma separated N values; times scale with N")
    p.add_argument("--observable", default="S_hydro_sys")
    return parser


def _config(args):
    config = load_config(args.config, args.overrides)
    if args.output_dir:
        config = config.with_overrides([f"output_dir={args.output_dir}"])
    return config


def _scenario_table(args, observable: str) -> SeriesTable:
    result = run_scenario(_config(args), write=bool(args.output_dir))
    for table in (result.entropy, result.current, *result.series.values()):
        if observable in table:
            return table
    raise ParameterError(f"no engine in the scenario produces {observable!r}")


def _emit(lines) -> None:
    for line in lines:
        print(line)


def _cmd_run(args) -> int:
    config = _config(args)
    result = run_scenario(config)
    for path in result.files:
        print(f"wrote {path}")
    for note in result.notes:
        print(f"note: {note}", file=sys.stderr)
    return EXIT_OK


def _cmd_compare(args) -> int:
    if args.input:
        if len(args.input) > 2:
            raise ParameterError("compare takes one or two --input files")
        a = read_csv(args.input[0])
        b = read_csv(args.input[-1])
    else:
        if not args.config:
            raise ParameterError("compare needs --config or --input")
        result = run_scenario(_config(args), write=bool(args.output_dir))
        merged = {**result.entropy.columns, **result.current.columns}
        a = b = SeriesTable(merged, result.entropy.metadata, result.entropy.config)
    report = compare_series(a, b, args.observable, args.against, args.t_min, args.t_max)
    _emit(report.lines())
    return EXIT_OK


def _cmd_fit(args) -> int:
    if args.input:
        table = read_csv(args.input)
    elif args.config:
        table = _scenario_table(args, args.observable)
    else:
        raise ParameterError("fit needs --config or --input")
    try:
        lo, hi = (float(v) for v in args.window.split(","))
    except ValueError:
        raise ParameterError(f"--window must be 't_lo,t_hi', got {args.window!r}") from None
    if args.page_units:
        scale = table.metadata.get("t_page")
        if scale is None:
            raise ParameterError("table has no t_page metadata for --page-units")
        lo, hi = lo * float(scale), hi * float(scale)
    fit = fit_tail(table["t"], table[args.observable], window=(lo, hi))
    _emit(
        [
            f"observable = {args.observable}",
            f"window = {lo:.17g}, {hi:.17g}",
            f"exponent = {fit.exponent:.17g}",
            f"prefactor = {fit.prefactor:.17g}",
            f"residual = {fit.residual:.17g}",
            f"samples = {fit.n_samples}",
        ]
    )
    return EXIT_OK


def _cmd_collapse(args) -> int:
    if args.input:
        tables = [read_csv(path) for path in args.input]
    elif args.config and args.sizes:
        base = _config(args)
        tables = []
        for item in args.sizes.split(","):
            n = int(item)
            scale = n / base.model.N
            times = ", ".join(repr(float(t) * scale) for t in base.times)
            cfg = base.with_overrides([f"model.N={n}", f"times={times}", "profile_times="])
            result = run_scenario(cfg, write=False)
            tables.append(result.entropy if args.observable in result.entropy else result.current)
    else:
        raise ParameterError("collapse needs --input files or --config with --sizes")
    report = collapse_check(tables, args.observable)
    _emit(report.lines())
    return EXIT_OK


_COMMANDS = {"run": _cmd_run, "compare": _cmd_compare, "fit": _cmd_fit, "collapse": _cmd_collapse}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return _COMMANDS[args.command](args)
    except (NumericError, RangeError, FloatingPointError) as exc:
        print(f"pagecurve: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ParameterError, DomainError, AlignmentError, UnsupportedDefectError, KeyError, OSError) as exc:
        print(f"pagecurve: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
