"""Flat output records, serialized as CSV or JSON lines.

Floats are written with 17 significant digits, which round-trips every
double exactly, so identical inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
import sys
from pathlib import Path
from typing import Iterable, Optional, Sequence

FORMATS = ("csv", "jsonl")


def format_float(v: float) -> str:
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, ".17g")


def _text(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format_float(v)
    if isinstance(v, enum.Enum):
        return str(v.value)
    return str(v)


def _json(v) -> str:
    if isinstance(v, float) and math.isfinite(v):
        return format_float(v)
    if isinstance(v, float):
        return json.dumps(format_float(v))  # non-finite values as strings
    if isinstance(v, enum.Enum):
        return json.dumps(v.value)
    return json.dumps(v)


def render(records: Iterable[dict], fields: Sequence[str], fmt: str) -> str:
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}")
    buf = io.StringIO()
    if fmt == "csv":
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(fields)
        for rec in records:
            w.writerow([_text(rec.get(k)) for k in fields])
    else:
        for rec in records:
            body = ", ".join(f"{json.dumps(k)}: {_json(rec.get(k))}" for k in fields)
            buf.write("{" + body + "}\n")
    return buf.getvalue()


def emit_records(records: Iterable[dict], fields: Sequence[str], fmt: str = "csv", out: Optional[str] = None) -> None:
    text = render(records, fields, fmt)
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write records to {out}: {exc}") from exc


def parse_csv(text: str) -> list[dict]:
    """Read back CSV output; numeric-looking cells become floats."""
    rows = []
    for row in csv.DictReader(io.StringIO(text)):
        rows.append({k: _parse_cell(v) for k, v in row.items()})
    return rows


def _parse_cell(v: str):
    if v == "":
        return None
    if v in ("true", "false"):
        return v == "true"
    try:
        return int(v)
    except ValueError:
        pass
    try:
        return float(v)
    except ValueError:
        return v
