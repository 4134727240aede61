"""CSV input and output helpers."""

from __future__ import annotations

import csv
import math
from typing import TextIO

import numpy as np

from .errors import InputFormatError

__all__ = ["format_float", "read_column"]


def format_float(x: float) -> str:
    """17 significant digits; round-trips every float64."""
    if math.isnan(x):
        return "nan"
    return f"{x:.17g}"


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def read_column(fh: TextIO, column: str | None = None) -> np.ndarray:
    """Read one numeric column from a CSV stream with a header row.

    Without ``column`` the first column whose first data cell parses as a
    number is used.  Empty cells are rejected rather than skipped.
    """
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        raise InputFormatError("empty input; a header row is required") from None
    header = [h.strip() for h in header]
    rows = [r for r in reader if r and any(c.strip() for c in r)]
    if not rows:
        raise InputFormatError("no data rows")
    if column is None:
        idx = next((j for j in range(len(header)) if j < len(rows[0]) and _is_number(rows[0][j])), None)
        if idx is None:
            raise InputFormatError("no numeric column found")
    else:
        if column not in header:
            raise InputFormatError(f"column {column!r} not in header {header}")
        idx = header.index(column)
    out = np.empty(len(rows))
    for i, r in enumerate(rows, start=2):
        if idx >= len(r):
            raise InputFormatError(f"line {i}: missing column {header[idx]!r}")
        try:
            out[i - 2] = float(r[idx])
        except ValueError:
            raise InputFormatError(f"line {i}: {r[idx]!r} is not a number") from None
    if not np.all(np.isfinite(out)):
        raise InputFormatError(f"column {header[idx]!r} contains non-finite values")
    return out
