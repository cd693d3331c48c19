"""Column tables and their CSV form.

A file starts with ``#`` preamble lines (``# key: value`` metadata, then
``# config: key = value`` lines echoing the resolved scenario), followed by
a header row and data rows.  Numbers are written with ``%.17g`` so that a
round trip is bit-exact.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import __version__
from ..errors import AlignmentError, ConfigError

__all__ = ["SeriesTable", "emit_csv", "read_csv", "config_text_from_csv"]

_CONFIG_PREFIX = "config: "


@dataclass(frozen=True)
class SeriesTable:
    """Named float columns of equal length plus provenance.

    If a ``t`` column is present it must be strictly increasing.
    """

    columns: dict[str, np.ndarray]
    metadata: dict[str, str] = field(default_factory=dict)
    config: tuple[str, ...] = ()

    def __post_init__(self):
        cols = {str(k): np.asarray(v, dtype=float).ravel() for k, v in self.columns.items()}
        lengths = {v.size for v in cols.values()}
        if len(lengths) > 1:
            raise AlignmentError(f"columns differ in length: { {k: v.size for k, v in cols.items()} }")
        if "t" in cols and cols["t"].size > 1 and np.any(np.diff(cols["t"]) <= 0):
            raise AlignmentError("column 't' must be strictly increasing")
        object.__setattr__(self, "columns", cols)
        object.__setattr__(self, "metadata", {str(k): str(v) for k, v in self.metadata.items()})
        object.__setattr__(self, "config", tuple(self.config))

    def __getitem__(self, name: str) -> np.ndarray:
        try:
            return self.columns[name]
        except KeyError:
            raise KeyError(f"no column {name!r}; have {list(self.columns)}") from None

    def __contains__(self, name: str) -> bool:
        return name in self.columns

    def __len__(self) -> int:
        return next(iter(self.columns.values())).size if self.columns else 0

    @property
    def names(self) -> list[str]:
        return list(self.columns)

    def config_value(self, key: str) -> str | None:
        for line in self.config:
            k, _, v = line.partition("=")
            if k.strip() == key:
                return v.strip()
        return None

    def select(self, names) -> "SeriesTable":
        return SeriesTable({n: self[n] for n in names}, self.metadata, self.config)


def _format(x: float) -> str:
    return "%.17g" % x


def emit_csv(table: SeriesTable, path) -> Path:
    """Write ``table`` to ``path``; raises ``OSError`` on I/O failure."""
    path = Path(path)
    buf = io.StringIO(newline="")
    buf.write(f"# generator: pagecurve {__version__}\r\n")
    for key, value in table.metadata.items():
        if key == "generator":
            continue
        buf.write(f"# {key}: {value}\r\n")
    for line in table.config:
        buf.write(f"# {_CONFIG_PREFIX}{line}\r\n")
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(table.names)
    if table.columns:
        data = np.column_stack([table[n] for n in table.names])
        for row in data:
            writer.writerow([_format(v) for v in row])
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())
    return path


def _split_preamble(text: str) -> tuple[dict[str, str], list[str], list[str]]:
    metadata: dict[str, str] = {}
    config: list[str] = []
    body: list[str] = []
    lines = text.splitlines()
    i = 0
    while i < len(lines) and lines[i].startswith("#"):
        content = lines[i][1:].strip()
        if content.startswith(_CONFIG_PREFIX):
            config.append(content[len(_CONFIG_PREFIX):])
        else:
            key, _, value = content.partition(":")
            metadata[key.strip()] = value.strip()
        i += 1
    body = lines[i:]
    return metadata, config, body


def read_csv(path) -> SeriesTable:
    """Parse a file written by :func:`emit_csv`."""
    text = Path(path).read_text(encoding="utf-8")
    metadata, config, body = _split_preamble(text)
    rows = list(csv.reader(body))
    if not rows:
        raise ConfigError(f"{path}: missing header row")
    header = [h for h in rows[0] if h != ""] if rows[0] else []
    data = [r for r in rows[1:] if r]
    if any(len(r) != len(header) for r in data):
        raise AlignmentError(f"{path}: ragged rows")
    values = np.array([[float(v) for v in r] for r in data], dtype=float).reshape(len(data), len(header))
    return SeriesTable({h: values[:, j] for j, h in enumerate(header)}, metadata, tuple(config))


def config_text_from_csv(text: str) -> str:
    """Recover the config echo of a CSV file as config-file text."""
    _, config, _ = _split_preamble(text)
    if not config:
        raise ConfigError("file carries no config echo")
    return "\n".join(config)
