"""CSV reading and per-kind schema validation.

Each plot kind declares the columns it needs; extra columns are allowed
(trace files carry plant-specific extras). Violations raise SchemaError
naming the file and the missing columns.
"""

from __future__ import annotations

import csv
from pathlib import Path

#: required columns per plot kind (inputs may carry more)
SCHEMAS = {
    "curves": ("l", "fl", "fp", "v_bar", "fv"),
    "hold": ("t", "q"),
    "learning": ("generation", "mean_return", "max_return",
                 "mean_episode_len"),
    "hop": ("t", "z"),
    "beta-map": ("beta", "controller_hz", "amplitude", "stable"),
}


class SchemaError(Exception):
    """Input CSV does not match the expected schema for the plot kind."""


def read_table(path, required):
    """Return {column: list[float]} for the required columns.

    Raises SchemaError if the file is missing, has no header, lacks any
    required column (all missing ones are named), has no data rows, or
    holds a non-numeric cell in a required column.
    """
    p = Path(path)
    if not p.is_file():
        raise SchemaError(f"{path}: no such file")
    with open(p, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file (no header)")
        missing = [c for c in required if c not in header]
        if missing:
            raise SchemaError(
                f"{path}: missing required column(s) {', '.join(missing)}; "
                f"header has {', '.join(header)}")
        idx = {c: header.index(c) for c in required}
        cols = {c: [] for c in required}
        for row_no, row in enumerate(reader, 2):
            if not row:
                continue
            for c in required:
                cell = row[idx[c]] if idx[c] < len(row) else ""
                try:
                    cols[c].append(float(cell))
                except ValueError:
                    raise SchemaError(
                        f"{path}:{row_no}: column {c} holds non-numeric "
                        f"value {cell!r}")
    if not cols[required[0]]:
        raise SchemaError(f"{path}: no data rows")
    return cols
