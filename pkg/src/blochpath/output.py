"""Deterministic CSV / JSON writers for scenario data."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def format_params(params: dict) -> str:
    return " ".join(f"{k}={fmt(v)}" for k, v in params.items())


def _json_value(x):
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    x = float(x)
    # keep inf/nan as the same strings the CSV uses
    return fmt(x) if not math.isfinite(x) else x


def write_table(path, columns: dict, params: dict, fmt_name: str = "csv", notes: dict | None = None) -> Path:
    """Write equal-length columns as CSV (comment line, header, rows) or JSON.

    ``notes`` become trailing ``# key=value`` lines in CSV and a top-level
    "notes" object in JSON.
    """
    path = Path(path)
    names = list(columns)
    data = [list(np.asarray(columns[n], dtype=object).ravel()) for n in names]
    n_rows = {len(col) for col in data}
    if len(n_rows) > 1:
        raise ValueError(f"columns differ in length: {dict(zip(names, map(len, data)))}")
    rows = list(zip(*data))

    if fmt_name == "csv":
        lines = [f"# params: {format_params(params)}", ",".join(names)]
        lines += [",".join(fmt(v) for v in row) for row in rows]
        lines += [f"# {k}={fmt(v)}" for k, v in (notes or {}).items()]
        text = "\n".join(lines) + "\n"
    elif fmt_name == "json":
        doc = {
            "params": {k: _json_value(v) for k, v in params.items()},
            "columns": names,
            "rows": [[_json_value(v) for v in row] for row in rows],
        }
        if notes:
            doc["notes"] = {k: _json_value(v) for k, v in notes.items()}
        text = json.dumps(doc, indent=1) + "\n"
    else:
        raise ValueError(f"unknown format {fmt_name!r}")

    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


def read_csv(path) -> tuple[dict, dict[str, list[str]], dict]:
    """Parse a file written by :func:`write_table`; returns (params, columns, notes) as strings."""
    lines = Path(path).read_text().splitlines()
    params = dict(tok.split("=", 1) for tok in lines[0].removeprefix("# params:").split())
    header = lines[1].split(",")
    cols: dict[str, list[str]] = {h: [] for h in header}
    notes = {}
    for line in lines[2:]:
        if line.startswith("#"):
            k, v = line[1:].strip().split("=", 1)
            notes[k] = v
            continue
        for h, v in zip(header, line.split(",")):
            cols[h].append(v)
    return params, cols, notes
