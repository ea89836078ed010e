"""Config-file parsing and deterministic table output."""
from __future__ import annotations

import csv
import io
import json
import math
import sys

from . import __version__
from .errors import ParameterError


def read_config(path: str) -> dict[str, str]:
    """Parse a flat ``key = value`` file. ``#`` starts a comment line."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ParameterError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def fmt_value(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".17g")
    return str(x)


def header_record(command: str, params: dict) -> dict:
    return {"artifact": "qtrlab", "version": __version__, "command": command, "params": params}


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=True)


def render_table(command, params, columns, rows, fmt="csv", summary=None) -> str:
    """Render a data file body.

    ``csv``: one ``#``-prefixed JSON header line, a column-name row, data rows,
    and an optional trailing ``# summary {...}`` line.
    ``jsonl``: ``{"header": ...}``, one object per row, optional ``{"summary": ...}``.
    """
    buf = io.StringIO(newline="")
    header = header_record(command, params)
    if fmt == "csv":
        buf.write("# " + _json(header) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([fmt_value(x) for x in row])
        if summary is not None:
            buf.write("# summary " + _json(summary) + "\n")
    elif fmt == "jsonl":
        buf.write(_json({"header": header}) + "\n")
        for row in rows:
            buf.write(_json(dict(zip(columns, row))) + "\n")
        if summary is not None:
            buf.write(_json({"summary": summary}) + "\n")
    else:
        raise ParameterError(f"format must be 'csv' or 'jsonl', got {fmt!r}")
    return buf.getvalue()


def write_text(text: str, path: str | None):
    if path is None or path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
