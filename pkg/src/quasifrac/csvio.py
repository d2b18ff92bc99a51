"""CSV readers and writers for coefficient files, matrices and reports.

Floats are written with ``repr``, the shortest string that reads back to the
identical double, so reports are byte-stable and round-trip exactly.
"""

from __future__ import annotations

import csv
import io
import math
import re
from typing import Iterable, Sequence, TextIO

import numpy as np

from .errors import ParseError

_SIZE_LINE = re.compile(r"^\s*N\s*=\s*(\d+)\s*$")


def _read_text(path) -> str:
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _parse_float(text: str, where: str) -> float:
    try:
        return float(text.strip())
    except ValueError:
        raise ParseError(f"{where}: {text.strip()!r} is not a number") from None


def read_columns(path, header: Sequence[str]) -> list[list[float]]:
    """Numeric columns of a CSV file whose header must be exactly ``header``.

    Blank lines are ignored.  Values may be in decimal or scientific notation.
    """
    rows = [r for r in csv.reader(io.StringIO(_read_text(path))) if any(c.strip() for c in r)]
    if not rows:
        raise ParseError(f"{path}: empty file")
    got = [c.strip() for c in rows[0]]
    if got != list(header):
        raise ParseError(f"{path}: header must be {','.join(header)!r}, got {','.join(got)!r}")
    cols: list[list[float]] = [[] for _ in header]
    for line_no, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ParseError(f"{path}:{line_no}: expected {len(header)} fields, got {len(row)}")
        for j, cell in enumerate(row):
            cols[j].append(_parse_float(cell, f"{path}:{line_no}"))
    return cols


def read_matrix(path) -> np.ndarray:
    """Square complex matrix: ``N=<int>`` then N*N lines ``re,im`` in row-major order."""
    lines = [ln for ln in _read_text(path).splitlines() if ln.strip()]
    if not lines:
        raise ParseError(f"{path}: empty file")
    m = _SIZE_LINE.match(lines[0])
    if m is None:
        raise ParseError(f"{path}: first line must be 'N=<int>', got {lines[0]!r}")
    n = int(m.group(1))
    if n < 1:
        raise ParseError(f"{path}: N must be at least 1")
    body = lines[1:]
    if len(body) != n * n:
        raise ParseError(f"{path}: expected {n * n} entries for N={n}, got {len(body)}")
    out = np.empty(n * n, dtype=complex)
    for j, ln in enumerate(body):
        parts = ln.split(",")
        if len(parts) != 2:
            raise ParseError(f"{path}:{j + 2}: expected 're,im', got {ln!r}")
        where = f"{path}:{j + 2}"
        out[j] = complex(_parse_float(parts[0], where), _parse_float(parts[1], where))
    return out.reshape(n, n)


def write_matrix(fh: TextIO, mat: np.ndarray) -> None:
    mat = np.asarray(mat, dtype=complex)
    fh.write(f"N={mat.shape[0]}\n")
    for z in mat.ravel():
        fh.write(f"{fmt(z.real)},{fmt(z.imag)}\n")


def fmt(value) -> str:
    """Round-trip text for a number: repr for floats, str for ints and flags."""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    v = float(value)
    if math.isnan(v):
        return "nan"
    return repr(v)


def write_rows(fh: TextIO, rows: Iterable[Sequence], header: Sequence[str] | None = None) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    if header is not None:
        writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])


__all__ = ["fmt", "read_columns", "read_matrix", "write_matrix", "write_rows"]
