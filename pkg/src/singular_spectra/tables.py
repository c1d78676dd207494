"""Deterministic CSV / JSON / text serialization of homogeneous records."""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from enum import Enum

import gmpy2

FORMATS = ("csv", "json", "text")


def _cell(value):
    """A JSON-compatible scalar for one field."""
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        return value
    if type(value).__name__ == "mpfr":
        return float(value)
    if hasattr(value, "item"):  # numpy scalars
        return value.item()
    if isinstance(value, dict):
        return {str(k): _cell(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_cell(v) for v in value]
    return str(value)


def _text(value) -> str:
    """Full-precision decimal text for CSV and plain-text output."""
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return ""
    if type(value).__name__ == "mpfr":
        if gmpy2.is_nan(value) or gmpy2.is_infinite(value):
            return repr(float(value))
        return str(value)
    if hasattr(value, "item"):
        value = value.item()
    if isinstance(value, float):
        return repr(value) if math.isfinite(value) else str(value)
    if isinstance(value, (list, tuple, dict)):
        return json.dumps(_cell(value), sort_keys=False, separators=(",", ":"))
    return str(value)


def render(records: list, fmt: str, columns: list | None = None) -> str:
    """Serialize ``records`` (a list of dicts with the same keys) to a string."""
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; expected one of {', '.join(FORMATS)}")
    records = list(records)
    if columns is None:
        columns = list(records[0].keys()) if records else []
    for r in records:
        if list(r.keys()) != columns:
            raise ValueError("records must all have the same keys in the same order")
    if fmt == "json":
        rows = [{c: _cell(r[c]) for c in columns} for r in records]
        return json.dumps(rows, indent=2, allow_nan=True) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in records:
            w.writerow([_text(r[c]) for c in columns])
        return buf.getvalue()
    cells = [[_text(r[c]) for c in columns] for r in records]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip()]
    for row in cells:
        lines.append("  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"


def write_table(records: list, fmt: str = "csv", path: str | None = None, columns: list | None = None) -> None:
    """Write records to ``path`` (stdout when None or "-")."""
    text = render(records, fmt, columns)
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
