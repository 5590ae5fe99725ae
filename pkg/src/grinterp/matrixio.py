"""File formats: whitespace matrix text files and CSV outputs.

Matrix text format (shared by all tools): first line "rows cols", then
one line per row of whitespace-separated decimals at 17 significant
digits, row-major.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable

import numpy as np

from ._validation import as_float_matrix


def write_matrix(path, m) -> None:
    a = as_float_matrix(m, "matrix")
    rows, cols = a.shape
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{rows} {cols}\n")
        for row in a:
            fh.write(" ".join(f"{x:.17g}" for x in row) + "\n")


def read_matrix(path) -> np.ndarray:
    text = Path(path).read_text(encoding="ascii").split()
    if len(text) < 2:
        raise ValueError(f"{path}: missing 'rows cols' header")
    rows, cols = int(text[0]), int(text[1])
    data = [float(x) for x in text[2:]]
    if len(data) != rows * cols:
        raise ValueError(
            f"{path}: expected {rows * cols} entries, found {len(data)}"
        )
    return np.array(data).reshape(rows, cols)


def write_csv(path, header: list[str], rows: Iterable[Iterable]) -> None:
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(_format_row(row))


def _format_row(row: Iterable) -> list[str]:
    out = []
    for x in row:
        if isinstance(x, float):
            out.append(f"{x:.17g}")
        else:
            out.append(str(x))
    return out
