"""Binary and plain-text export of grid fields.

Binary layout (little endian): a 32-byte header ``<4sHH4Id`` holding the magic
``b"PFLB"``, format version, dimension N, four uint32 axis counts (unused axes
are 0) and the spacing h, followed by the node values as float64 in C order.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .geometry import GridField

MAGIC = b"PFLB"
VERSION = 1
_HEADER = struct.Struct("<4sHH4Id")
TEXT_NODE_LIMIT = 10_000

assert _HEADER.size == 32


def write_field(path, field: GridField) -> Path:
    grid = field.grid
    if grid.ndim > 4:
        raise ValueError("binary field format supports at most 4 axes")
    shape = list(grid.shape) + [0] * (4 - grid.ndim)
    path = Path(path)
    with path.open("wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, grid.ndim, *shape, grid.h))
        fh.write(np.ascontiguousarray(field.values, dtype="<f8").tobytes())
    return path


def read_field(path) -> tuple[np.ndarray, float]:
    """Returns ``(values, h)`` with values shaped as stored."""
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError("file too short for a PFLB header")
    magic, version, N, *rest = _HEADER.unpack_from(raw)
    shape, h = tuple(rest[:N]), rest[4]
    if magic != MAGIC:
        raise ValueError(f"bad magic {magic!r}")
    if version != VERSION:
        raise ValueError(f"unsupported PFLB version {version}")
    n = int(np.prod(shape))
    body = raw[_HEADER.size :]
    if len(body) != 8 * n:
        raise ValueError(f"expected {n} float64 values, found {len(body) // 8}")
    return np.frombuffer(body, dtype="<f8").reshape(shape).copy(), float(h)


def write_field_text(path, field: GridField, fmt: str = "%.17g") -> Path:
    grid = field.grid
    if grid.ndim > 2:
        raise ValueError("text export supports 1-D and 2-D grids only")
    if grid.n_nodes > TEXT_NODE_LIMIT:
        raise ValueError(f"text export is limited to {TEXT_NODE_LIMIT} nodes")
    path = Path(path)
    np.savetxt(path, np.atleast_2d(field.values), fmt=fmt, header=f"h={grid.h!r} shape={grid.shape}")
    return path
