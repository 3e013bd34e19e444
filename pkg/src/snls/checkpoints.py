"""Binary checkpoints, CSV exports, and atomic manifest persistence.

Field checkpoint layout (little-endian):
    magic "SNLS" | version u32 | n u64 | r_max f64 | n complex pairs (f64, f64)

A trajectory file reuses the same header followed by frame records, each
    t f64 | n complex pairs (f64, f64)

Writers are crash-safe: whole-file writes go through a temp file plus
rename; the frame log is append-only and the reader drops a truncated
final record.
"""

from __future__ import annotations

import json
import os
import struct
from pathlib import Path

import numpy as np

from .radial import RadialField, RadialGrid

__all__ = [
    "write_field",
    "read_field",
    "field_to_csv",
    "TrajectoryFrameWriter",
    "read_trajectory_frames",
    "write_manifest",
    "read_manifest",
    "DENSITY_CSV_COLUMNS",
]

MAGIC = b"SNLS"
VERSION = 1
_HEADER = struct.Struct("<4sIQd")

DENSITY_CSV_COLUMNS = ("t", "mass", "energy", "Hsc", "Hsc_md", "Hsc_p1", "s_density", "boundary_mass")


def _atomic_write_bytes(path, payload: bytes) -> None:
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as f:
        f.write(payload)
        f.flush()
        os.fsync(f.fileno())
    os.replace(tmp, path)


def _header_bytes(grid: RadialGrid) -> bytes:
    return _HEADER.pack(MAGIC, VERSION, grid.n, grid.r_max)


def _parse_header(buf: bytes) -> RadialGrid:
    magic, version, n, r_max = _HEADER.unpack_from(buf, 0)
    if magic != MAGIC:
        raise ValueError(f"bad magic {magic!r}; not a field checkpoint")
    if version != VERSION:
        raise ValueError(f"unsupported checkpoint version {version}")
    return RadialGrid(r_max=r_max, n=int(n))


def _pairs_bytes(values: np.ndarray) -> bytes:
    flat = np.empty(2 * values.size)
    flat[0::2] = values.real
    flat[1::2] = values.imag
    return flat.astype("<f8").tobytes()


def _pairs_from(buf: bytes, n: int) -> np.ndarray:
    flat = np.frombuffer(buf, dtype="<f8", count=2 * n)
    return (flat[0::2] + 1j * flat[1::2]).astype(np.complex128)


def write_field(path, field: RadialField) -> None:
    _atomic_write_bytes(path, _header_bytes(field.grid) + _pairs_bytes(field.values))


def read_field(path) -> RadialField:
    buf = Path(path).read_bytes()
    grid = _parse_header(buf)
    expected = _HEADER.size + 16 * grid.n
    if len(buf) < expected:
        raise ValueError(f"truncated field checkpoint: {len(buf)} < {expected} bytes")
    return RadialField(grid, _pairs_from(buf[_HEADER.size:], grid.n))


def field_to_csv(path, field: RadialField) -> None:
    lines = ["r,re_u,im_u"]
    for r, u in zip(field.grid.nodes, field.values):
        lines.append(f"{r!r},{u.real!r},{u.imag!r}")
    Path(path).write_text("\n".join(lines) + "\n")


class TrajectoryFrameWriter:
    """Append-only frame log; one header, then (t, samples) records."""

    def __init__(self, path, grid: RadialGrid, append: bool = False):
        self.grid = grid
        mode = "ab" if append and Path(path).exists() else "wb"
        self._f = open(path, mode)
        if mode == "wb":
            self._f.write(_header_bytes(grid))
            self._flush()

    def append(self, t: float, values: np.ndarray) -> None:
        self._f.write(struct.pack("<d", t))
        self._f.write(_pairs_bytes(values))
        self._flush()

    def _flush(self):
        self._f.flush()
        os.fsync(self._f.fileno())

    def close(self):
        self._f.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_trajectory_frames(path):
    """Return (grid, times, frames); a truncated final record is dropped."""
    buf = Path(path).read_bytes()
    grid = _parse_header(buf)
    rec = 8 + 16 * grid.n
    body = buf[_HEADER.size:]
    n_frames = len(body) // rec
    times = np.empty(n_frames)
    frames = np.empty((n_frames, grid.n), dtype=np.complex128)
    for m in range(n_frames):
        off = m * rec
        times[m] = struct.unpack_from("<d", body, off)[0]
        frames[m] = _pairs_from(body[off + 8 : off + rec], grid.n)
    return grid, times, frames


def truncate_trajectory_frames(path, n_frames: int) -> None:
    """Drop all records past the first n_frames (resume housekeeping)."""
    grid = _parse_header(Path(path).read_bytes()[:_HEADER.size])
    rec = 8 + 16 * grid.n
    with open(path, "r+b") as f:
        f.truncate(_HEADER.size + n_frames * rec)


def write_manifest(path, obj: dict) -> None:
    _atomic_write_bytes(path, (json.dumps(obj, indent=2, sort_keys=True) + "\n").encode())


def read_manifest(path) -> dict:
    with open(path) as f:
        return json.load(f)


def density_csv_header() -> str:
    return ",".join(DENSITY_CSV_COLUMNS)


def density_csv_row(t: float, stats: dict) -> str:
    vals = (t, stats["mass"], stats["energy"], stats["H_sc"], stats["H_sc_minus"],
            stats["H_sc_plus1"], stats["s_density"], stats["boundary_mass"])
    return ",".join(repr(float(v)) for v in vals)
