"""Deterministic on-disk formats shared by the CLI and the test suite.

Three formats cover every artifact:

* CSV with a single header line; floats are written with repr-exact
  precision (%.17g) so a file round-trips bit-for-bit through float().
* JSON with sorted keys and two-space indentation.
* A binary checkpoint for spectral states: the 44-byte header
  {magic "KDVH", version u32, m u32, eps f64, Lx f64, N u64, t f64}
  followed by N little-endian f64 samples of u.

Nothing here embeds timestamps, hostnames, or object ids: identical
inputs produce byte-identical files, which is what makes reruns
comparable with a plain byte compare.  All writes are atomic (temp file
in the target directory, then os.replace) so a crashed run never leaves
a truncated artifact behind.
"""

from __future__ import annotations

import json
import os
import struct
import tempfile

import numpy as np

from .errors import DomainError
from .hierarchy import FlowParams
from .spectral import FourierGrid, SpectralState

CHECKPOINT_MAGIC = b"KDVH"
CHECKPOINT_VERSION = 1
_HEADER = struct.Struct("<4sII d d Q d")


def format_float(v) -> str:
    """Shortest decimal form that parses back to the same binary64."""
    return f"{float(v):.17g}"


def atomic_write_bytes(path: str, data: bytes) -> None:
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def atomic_write_text(path: str, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def write_json(path: str, obj) -> None:
    atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def write_csv(path: str, header, columns) -> None:
    """Write named columns of equal length; floats via format_float."""
    header = list(header)
    columns = [np.atleast_1d(np.asarray(c)) for c in columns]
    if len(header) != len(columns):
        raise DomainError(
            f"{len(header)} header fields vs {len(columns)} columns")
    n = columns[0].shape[0]
    if any(c.shape != (n,) for c in columns):
        raise DomainError("columns must share one length")
    lines = [",".join(header)]
    for i in range(n):
        lines.append(",".join(format_float(c[i]) for c in columns))
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_csv(path: str):
    """Inverse of write_csv: returns (header, {name: float-array})."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if data.size == 0:
        data = np.empty((0, len(header)))
    return header, {name: data[:, j] for j, name in enumerate(header)}


def write_checkpoint(path: str, s: SpectralState) -> None:
    head = _HEADER.pack(CHECKPOINT_MAGIC, CHECKPOINT_VERSION,
                        s.params.m, s.params.eps, s.grid.Lx,
                        s.grid.N, s.t)
    atomic_write_bytes(path, head + np.asarray(s.u, dtype="<f8").tobytes())


def read_checkpoint(path: str) -> SpectralState:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise DomainError(f"{path}: truncated checkpoint header")
    magic, version, m, eps, Lx, N, t = _HEADER.unpack_from(raw)
    if magic != CHECKPOINT_MAGIC:
        raise DomainError(f"{path}: bad magic {magic!r}")
    if version != CHECKPOINT_VERSION:
        raise DomainError(f"{path}: unsupported version {version}")
    body = raw[_HEADER.size:]
    if len(body) != 8 * N:
        raise DomainError(
            f"{path}: payload {len(body)} bytes, expected {8 * N}")
    u = np.frombuffer(body, dtype="<f8").astype(float)
    grid = FourierGrid(Lx, N)
    return SpectralState(grid, u, t, FlowParams(m, eps))
