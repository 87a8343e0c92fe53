"""CSV and JSON encodings of report records.

Both encodings carry the same columns in the same order. Floats are written
with 17 significant digits, so values survive a round trip exactly; a missing
value is the token "na", never NaN.
"""
from __future__ import annotations

import csv
import io
import json
import math

SCHEMA_VERSION = 1
MISSING = "na"


def schema_line(command: str, columns) -> str:
    return f"#schema=cayleygraph.{command}.v{SCHEMA_VERSION}:" + ",".join(columns)


def format_value(v) -> str:
    if v is None:
        return MISSING
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float) or hasattr(v, "dtype"):
        v = float(v)
        if math.isnan(v):
            return MISSING
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.17g}"
    return str(v)


def _json_value(v):
    if v is None:
        return MISSING
    if isinstance(v, (bool, int)):
        return v
    if isinstance(v, float) or hasattr(v, "dtype"):
        s = format_value(v)
        return float(s) if s not in (MISSING, "inf", "-inf") else s
    return str(v)


def to_csv(command: str, columns, records) -> str:
    buf = io.StringIO()
    buf.write(schema_line(command, columns) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for rec in records:
        writer.writerow([format_value(rec.get(c)) for c in columns])
    return buf.getvalue()


def to_json(columns, records) -> str:
    rows = [{c: _json_value(rec.get(c)) for c in columns} for rec in records]
    return json.dumps(rows, indent=1) + "\n"


def render(command: str, columns, records, fmt: str) -> str:
    if fmt == "csv":
        return to_csv(command, columns, records)
    if fmt == "json":
        return to_json(columns, records)
    raise ValueError(f"unknown format {fmt!r}")


def read_csv(text: str) -> tuple[str, list[dict]]:
    """Inverse of `to_csv` for tests and fixture diffs: (schema line, rows of strings)."""
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#schema="):
        raise ValueError("missing #schema= header")
    reader = csv.DictReader(lines[1:])
    return lines[0], list(reader)
