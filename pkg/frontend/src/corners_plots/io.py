"""Table loading for the plotting component.

Reads the delimited outputs of the corners toolkit, either CSV with fixed
headers or JSON mirroring the same rows, and validates required columns
before any figure code runs.  All numerics live in the producing package;
this module only parses what it is given.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Dict, List, Sequence

import numpy as np


class PlotInputError(Exception):
    """Unusable input: missing file, empty table, malformed payload."""


class SchemaError(PlotInputError):
    """Input table does not match the documented schema."""


def load_rows(path) -> List[Dict[str, object]]:
    """Rows of a CSV or JSON table as a list of per-row dicts."""
    p = Path(path)
    if not p.is_file():
        raise PlotInputError(f"input file not found: {p}")
    if p.suffix.lower() == ".json":
        try:
            with open(p, encoding="utf-8") as fh:
                payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise PlotInputError(f"{p} is not valid JSON: {exc}") from exc
        if not isinstance(payload, list) or not all(
            isinstance(r, dict) for r in payload
        ):
            raise SchemaError(f"{p} must hold a JSON array of row objects")
        rows = payload
    else:
        with open(p, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None:
                raise SchemaError(f"{p} has no header row")
            rows = list(reader)
    if not rows:
        raise SchemaError(f"{p} contains no data rows")
    return rows


def require_columns(rows: Sequence[dict], columns: Sequence[str], path) -> None:
    """Raise naming every required column absent from the table."""
    missing = [c for c in columns if c not in rows[0]]
    if missing:
        raise SchemaError(
            f"{path} is missing required column(s): {', '.join(missing)}"
        )


def numeric_column(rows: Sequence[dict], name: str, path) -> np.ndarray:
    require_columns(rows, [name], path)
    try:
        return np.array([float(r[name]) for r in rows], dtype=float)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"column {name!r} in {path} is not numeric") from exc


def text_column(rows: Sequence[dict], name: str, path) -> List[str]:
    require_columns(rows, [name], path)
    return [str(r[name]) for r in rows]
