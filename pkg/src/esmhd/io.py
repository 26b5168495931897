"""Diagnostics CSV and binary field snapshots.

Snapshot layout (all little-endian)::

    8 bytes   magic  b"ESMHDSNP"
    uint32    version (1)
    uint32    dim
    uint32    N
    uint32    K
    float64   t
    float64   coords  (dim, K, n[, n])
    float64   state   (9, K, n[, n])
    float64   alpha   (K,)

with ``n = N + 1``.
"""
from __future__ import annotations

from dataclasses import dataclass
import os
import struct

import numpy as np

__all__ = [
    "DIAG_COLUMNS",
    "DiagnosticsWriter",
    "format_row",
    "read_diagnostics",
    "Snapshot",
    "write_fields",
    "read_fields",
    "SNAPSHOT_MAGIC",
]

DIAG_COLUMNS = (
    "step", "t", "dt", "S_total", "dSdt", "divB_L2", "min_rho", "min_p",
    "alpha_min", "alpha_mean", "alpha_max", "alpha_frac",
)

SNAPSHOT_MAGIC = b"ESMHDSNP"
SNAPSHOT_VERSION = 1
_HEADER = struct.Struct("<8sIIIId")


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def format_row(values) -> str:
    return ",".join(_fmt(v) for v in values)


class DiagnosticsWriter:
    """Append rows to a CSV file (or keep them in memory when ``path`` is None)."""

    def __init__(self, path: str | None, extra_columns=()):
        self.columns = DIAG_COLUMNS + tuple(extra_columns)
        self.path = path
        self.rows = []
        self._fh = None
        if path is not None:
            try:
                self._fh = open(path, "w", encoding="utf-8", newline="\n")
            except OSError as exc:
                raise OSError(f"cannot open diagnostics file {path}: {exc}") from exc
            self._fh.write(",".join(self.columns) + "\n")

    def write(self, row: dict):
        values = [row[c] for c in self.columns]
        self.rows.append(dict(zip(self.columns, values)))
        if self._fh is not None:
            self._fh.write(format_row(values) + "\n")
            self._fh.flush()

    def close(self):
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_diagnostics(path: str):
    """Read a diagnostics CSV into ``(columns, ndarray)``."""
    with open(path, encoding="utf-8") as fh:
        cols = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return cols, data


@dataclass
class Snapshot:
    t: float
    N: int
    x: np.ndarray
    u: np.ndarray
    alpha: np.ndarray

    @property
    def dim(self):
        return self.x.shape[0]


def write_fields(path: str, mesh, u, alpha, t: float):
    """Write a binary snapshot; see the module docstring for the layout."""
    K = mesh.K
    alpha = np.zeros(K) if alpha is None else np.asarray(alpha, dtype="<f8")
    header = _HEADER.pack(SNAPSHOT_MAGIC, SNAPSHOT_VERSION, mesh.dim, mesh.N, K, float(t))
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            for arr in (mesh.x, u, alpha):
                fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())
    except OSError as exc:
        raise OSError(f"cannot write snapshot {path}: {exc}") from exc
    return path


def read_fields(path: str) -> Snapshot:
    with open(path, "rb") as fh:
        raw = fh.read()
    magic, version, dim, N, K, t = _HEADER.unpack_from(raw, 0)
    if magic != SNAPSHOT_MAGIC:
        raise ValueError(f"{path}: not a snapshot file")
    if version != SNAPSHOT_VERSION:
        raise ValueError(f"{path}: unsupported snapshot version {version}")
    n = N + 1
    node = (K,) + (n,) * dim
    data = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    nx = dim * int(np.prod(node))
    nu = 9 * int(np.prod(node))
    if data.size != nx + nu + K:
        raise ValueError(f"{path}: truncated snapshot")
    x = data[:nx].reshape((dim,) + node).copy()
    u = data[nx:nx + nu].reshape((9,) + node).copy()
    alpha = data[nx + nu:].copy()
    return Snapshot(t=t, N=N, x=x, u=u, alpha=alpha)


def ensure_dir(path: str):
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {path}: {exc}") from exc
    return path
