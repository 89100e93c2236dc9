"""File formats: diagnostics CSV, binary field snapshots, JSON metadata.

CSV: header with the fixed column order from diagnostics.CSV_COLUMNS,
then one row per sample, every value printed with 17 significant digits
(round-trip exact for float64), newline-terminated.  Identical runs
produce bit-identical files.

Snapshot: magic b"NSKG", then little-endian u32 version (1), u32 N,
u32 field count; per field a u32 byte length followed by that many ASCII
name bytes, then N*N float64 little-endian values in row-major order.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from .diagnostics import CSV_COLUMNS, DiagnosticsRow

SNAPSHOT_MAGIC = b"NSKG"
SNAPSHOT_VERSION = 1


def format_value(x: float) -> str:
    return "%.17g" % float(x)


def write_diagnostics_csv(path, rows: list[DiagnosticsRow]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(",".join(CSV_COLUMNS) + "\n")
        for row in rows:
            f.write(",".join(format_value(getattr(row, c)) for c in CSV_COLUMNS) + "\n")


def read_diagnostics_csv(path) -> list[DiagnosticsRow]:
    with open(path, "r", encoding="utf-8") as f:
        header = f.readline().strip().split(",")
        if tuple(header) != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV header {header}")
        rows = []
        for line in f:
            if not line.strip():
                continue
            vals = [float(v) for v in line.strip().split(",")]
            rows.append(DiagnosticsRow(*vals))
    return rows


def write_snapshot(path, fields: dict[str, np.ndarray]) -> None:
    """Write named N x N float64 fields; dict order is the file order."""
    if not fields:
        raise ValueError("snapshot needs at least one field")
    shapes = {f.shape for f in fields.values()}
    if len(shapes) != 1:
        raise ValueError(f"fields must share one shape, got {shapes}")
    (shape,) = shapes
    if len(shape) != 2 or shape[0] != shape[1]:
        raise ValueError(f"fields must be square 2D arrays, got shape {shape}")
    N = shape[0]
    with open(path, "wb") as f:
        f.write(SNAPSHOT_MAGIC)
        f.write(struct.pack("<III", SNAPSHOT_VERSION, N, len(fields)))
        for name, arr in fields.items():
            blob = name.encode("ascii")
            f.write(struct.pack("<I", len(blob)))
            f.write(blob)
            f.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def read_snapshot(path) -> dict[str, np.ndarray]:
    with open(path, "rb") as f:
        magic = f.read(4)
        if magic != SNAPSHOT_MAGIC:
            raise ValueError(f"bad magic {magic!r}")
        version, N, count = struct.unpack("<III", f.read(12))
        if version != SNAPSHOT_VERSION:
            raise ValueError(f"unsupported snapshot version {version}")
        fields = {}
        for _ in range(count):
            (nlen,) = struct.unpack("<I", f.read(4))
            name = f.read(nlen).decode("ascii")
            data = np.frombuffer(f.read(8 * N * N), dtype="<f8").reshape(N, N)
            fields[name] = data.copy()
    return fields


def write_json(path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2)
        f.write("\n")
