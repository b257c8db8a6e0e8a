"""Record serialization for the command-line reports.

Records are flat mappings with a leading "record" kind tag. Two encodings
carry identical values: CSV (single header row over the union of keys,
RFC 4180 quoting, blank cell for a key a record lacks) and JSON lines (one
object per record, missing keys omitted). Floats are rendered as shortest
round-trip decimals, so no precision is lost in either encoding and the
same invocation always produces the same bytes.
"""

from __future__ import annotations

import csv
import io
import json
import numbers

import numpy as np

FORMATS = ("csv", "jsonl")


def _plain(value):
    """Coerce numpy scalars and friends to plain Python values."""
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if value is None or isinstance(value, str):
        return value
    if isinstance(value, numbers.Real):
        return float(value)
    raise TypeError(f"unsupported record value {value!r}")


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def format_records(records: list[dict], fmt: str) -> str:
    """Render records in the given format ("csv" or "jsonl")."""
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}, got {fmt!r}")
    rows = [{key: _plain(value) for key, value in rec.items()} for rec in records]

    if fmt == "jsonl":
        lines = [json.dumps(row, separators=(", ", ": ")) for row in rows]
        return "\n".join(lines) + "\n"

    columns: list[str] = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    sink = io.StringIO()
    writer = csv.writer(sink, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_csv_cell(row[key]) if key in row else ""
                         for key in columns])
    return sink.getvalue()


def write_records(records: list[dict], fmt: str, path: str | None) -> str:
    """Render and write records to path (or return only, when path is
    None); always returns the rendered text."""
    text = format_records(records, fmt)
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as sink:
            sink.write(text)
    return text
