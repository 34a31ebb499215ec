"""CSV / JSON-lines emission for result rows (dataclasses or plain dicts)."""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from dataclasses import asdict, is_dataclass

__all__ = ["FORMATS", "format_rows", "write_output"]

FORMATS = ("csv", "jsonl")


def _as_dict(row) -> dict:
    return asdict(row) if is_dataclass(row) else dict(row)


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isnan(v):
            return ""
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    return str(v)


def _json_value(v):
    # JSON has no inf/nan; keep them readable and lossless
    if isinstance(v, float) and not math.isfinite(v):
        return None if math.isnan(v) else ("inf" if v > 0 else "-inf")
    return v


def format_rows(rows, fmt: str = "csv", columns: list[str] | None = None) -> str:
    """Render rows; CSV has a header row and RFC 4180 quoting (CRLF line ends)."""
    if fmt not in FORMATS:
        raise ValueError(f"unknown output format {fmt!r}; expected one of {FORMATS}")
    dicts = [_as_dict(r) for r in rows]
    if columns is None:
        columns = list(dicts[0]) if dicts else []
    buf = io.StringIO(newline="")
    if fmt == "csv":
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(columns)
        for d in dicts:
            writer.writerow([_csv_cell(d.get(c)) for c in columns])
    else:
        for d in dicts:
            buf.write(json.dumps({c: _json_value(d.get(c)) for c in columns}) + "\n")
    return buf.getvalue()


def write_output(rows, fmt: str = "csv", path=None, columns: list[str] | None = None) -> None:
    """Write rows to ``path`` (``None`` or ``-`` means standard output)."""
    text = format_rows(rows, fmt, columns)
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", newline="") as fh:
        fh.write(text)
