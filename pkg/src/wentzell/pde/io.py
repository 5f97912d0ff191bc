"""Binary trajectory records and CSV time series.

Record layout (little endian): a ``<4sIIIId`` header holding the magic
``WNTZ``, format version, ring count ``Nr + 1``, ``Ntheta``, ``Nt`` and ``T``,
then ``Nt + 1`` frames of complex64 values in ring-major order.
"""
from __future__ import annotations

import csv
import struct
from pathlib import Path

import numpy as np

from ..errors import ContractError

MAGIC = b"WNTZ"
VERSION = 1
HEADER = struct.Struct("<4sIIIId")


def write_trajectory(path, frames, T: float) -> Path:
    frames = np.asarray(frames)
    if frames.ndim != 3:
        raise ContractError("frames must have shape (Nt + 1, rings, Ntheta)")
    n_frames, rings, nth = frames.shape
    path = Path(path)
    with path.open("wb") as fh:
        fh.write(HEADER.pack(MAGIC, VERSION, rings, nth, n_frames - 1, float(T)))
        fh.write(frames.astype("<c8").tobytes())
    return path


def read_trajectory(path):
    """Return ``(frames, T)`` from a binary record."""
    raw = Path(path).read_bytes()
    magic, version, rings, nth, Nt, T = HEADER.unpack_from(raw)
    if magic != MAGIC or version != VERSION:
        raise ContractError(f"{path}: not a trajectory record (magic {magic!r}, version {version})")
    body = np.frombuffer(raw, dtype="<c8", offset=HEADER.size)
    expected = (Nt + 1) * rings * nth
    if body.size != expected:
        raise ContractError(f"{path}: truncated record, {body.size} of {expected} values")
    return body.reshape(Nt + 1, rings, nth), T


def write_csv(path, header, rows) -> Path:
    """Plain CSV with a header row, '.' decimals and LF line endings."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def read_csv(path):
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]
