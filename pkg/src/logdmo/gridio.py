"""
FKG1 section files and CSV tables.

FKG1 layout, all little-endian::

    magic   4s   b"FKG1"
    n_t     u32
    n_x     u32
    dt, dx, t_start, x_start, h   5 x f64
    payload n_x traces of n_t f32, traces in increasing x, samples in increasing t
"""

from __future__ import annotations

import csv
import io
import os
import struct
import tempfile
from contextlib import contextmanager
from typing import BinaryIO, Mapping, Sequence

import numpy as np

from .fk import Section

MAGIC = b"FKG1"
HEADER = struct.Struct("<4sII5d")
HEADER_SIZE = HEADER.size  # 52


class FormatError(ValueError):
    """Malformed or truncated FKG1 data."""


@contextmanager
def _open(target, mode):
    if hasattr(target, "write" if "w" in mode else "read"):
        yield target
    else:
        with open(target, mode) as fh:
            yield fh


def section_bytes(sec: Section) -> bytes:
    header = HEADER.pack(MAGIC, sec.n_t, sec.n_x, sec.dt, sec.dx, sec.t_start, sec.x_start, sec.h)
    payload = np.ascontiguousarray(sec.grid.T, dtype="<f4").tobytes()
    return header + payload


def write_section(sec: Section, sink: BinaryIO | str | os.PathLike) -> int:
    data = section_bytes(sec)
    with _open(sink, "wb") as fh:
        fh.write(data)
    return len(data)


def parse_section(data: bytes) -> Section:
    if len(data) < HEADER_SIZE:
        raise FormatError(f"truncated header: {len(data)} of {HEADER_SIZE} bytes")
    magic, n_t, n_x, dt, dx, t_start, x_start, h = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}")
    if n_t == 0 or n_x == 0:
        raise FormatError(f"zero dimension in header (n_t={n_t}, n_x={n_x})")
    need = HEADER_SIZE + 4 * n_t * n_x
    if len(data) < need:
        raise FormatError(f"truncated payload: {len(data) - HEADER_SIZE} of {need - HEADER_SIZE} bytes")
    if len(data) > need:
        raise FormatError(f"{len(data) - need} trailing bytes after payload")
    traces = np.frombuffer(data, dtype="<f4", count=n_t * n_x, offset=HEADER_SIZE)
    grid = traces.reshape(n_x, n_t).T.astype(float)
    try:
        return Section(grid, dt, dx, t_start, x_start, h)
    except ValueError as err:
        raise FormatError(str(err)) from err


def read_section(source: BinaryIO | str | os.PathLike) -> Section:
    with _open(source, "rb") as fh:
        return parse_section(fh.read())


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if isinstance(value, (np.integer,)):
        return str(int(value))
    return str(value)


def csv_text(columns: Mapping[str, Sequence]) -> str:
    names = list(columns)
    cols = [list(columns[n]) for n in names]
    lengths = {len(c) for c in cols}
    if len(lengths) > 1:
        raise ValueError(f"table is not rectangular: column lengths {sorted(lengths)}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(names)
    for row in zip(*cols):
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def write_csv(columns: Mapping[str, Sequence], sink) -> int:
    """Write named columns as CSV; floats carry 17 significant digits."""
    text = csv_text(columns)
    with _open(sink, "w") as fh:
        fh.write(text)
    return len(text.encode())


def read_csv(source) -> dict[str, list]:
    """Parse a table written by :func:`write_csv`; numeric cells become floats."""
    with _open(source, "r") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError("empty CSV")
    names = rows[0]
    out = {n: [] for n in names}
    for row in rows[1:]:
        for n, cell in zip(names, row):
            try:
                out[n].append(float(cell))
            except ValueError:
                out[n].append(cell)
    return out


def atomic_write(path: str | os.PathLike, data: bytes | str) -> None:
    """Write to a temporary file beside ``path`` and rename it into place."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, mode) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
