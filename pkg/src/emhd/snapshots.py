"""Binary snapshot format shared by every tool in the repo.

Layout (little-endian):
    magic   8 bytes  "EMHDSNAP"
    u32     version (= 1)
    u32     n        grid points per axis
    u32     ncomp    1 (scalar) or 3 (vector)
    f64     time
    f64     mu
    f64     d_i
    then ncomp * n^3 coefficient pairs (f64 re, f64 im), k-index row-major
    with k3 fastest and components outermost (the native FFT cube order).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .grid import Grid, SpectralField

MAGIC = b"EMHDSNAP"
VERSION = 1
_HEADER = struct.Struct("<8sIII ddd".replace(" ", ""))


class SnapshotError(ValueError):
    pass


@dataclass(frozen=True)
class Snapshot:
    field: SpectralField
    mu: float
    d_i: float


def write_snapshot(path, field: SpectralField, mu: float, d_i: float) -> None:
    payload = np.ascontiguousarray(field.coeffs.astype("<c16", copy=False))
    header = _HEADER.pack(
        MAGIC, VERSION, field.grid.n, field.ncomp, float(field.time), mu, d_i
    )
    Path(path).write_bytes(header + payload.tobytes())


def read_snapshot(path) -> Snapshot:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise SnapshotError(
            f"bad snapshot header: file ends at byte {len(raw)}, "
            f"header needs {_HEADER.size}"
        )
    magic, version, n, ncomp, time, mu, d_i = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise SnapshotError("bad snapshot header: wrong magic bytes")
    if version != VERSION:
        raise SnapshotError(f"bad snapshot header: unsupported version {version}")
    if ncomp not in (1, 3):
        raise SnapshotError(f"bad snapshot header: ncomp must be 1 or 3, got {ncomp}")
    expected = _HEADER.size + ncomp * n**3 * 16
    if len(raw) != expected:
        raise SnapshotError(
            f"truncated snapshot: have {len(raw)} bytes, need {expected} "
            f"(short by {expected - len(raw)} at offset {len(raw)})"
        )
    coeffs = (
        np.frombuffer(raw, dtype="<c16", offset=_HEADER.size)
        .reshape(ncomp, n, n, n)
        .astype(np.complex128)
    )
    return Snapshot(SpectralField(Grid(n), coeffs, time), mu, d_i)
