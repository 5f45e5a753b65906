"""On-disk formats: field snapshots, checksums and the run manifest.

Snapshot layout (little-endian): 32-byte header ``magic[8] dim:int32 n:int32
length:float64 time:float64`` followed by ``n**dim`` float64 values in C order.
"""

from __future__ import annotations

import hashlib
import json
import struct
from pathlib import Path

import numpy as np

from .spectral import PeriodicGrid

SNAPSHOT_MAGIC = b"FRPHSNAP"
_HEADER = struct.Struct("<8siidd")


def write_snapshot(path: str | Path, grid: PeriodicGrid, time: float, values: np.ndarray) -> None:
    values = np.asarray(values, dtype="<f8")
    if values.shape != grid.shape:
        raise ValueError(f"snapshot shape {values.shape} does not match grid {grid.shape}")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(SNAPSHOT_MAGIC, grid.dim, grid.n, float(grid.length), float(time)))
        fh.write(np.ascontiguousarray(values).tobytes())


def read_snapshot(path: str | Path) -> tuple[PeriodicGrid, float, np.ndarray]:
    raw = Path(path).read_bytes()
    magic, dim, n, length, time = _HEADER.unpack_from(raw)
    if magic != SNAPSHOT_MAGIC:
        raise ValueError(f"{path}: not a snapshot file")
    grid = PeriodicGrid(dim, n, length)
    values = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    if values.size != grid.size:
        raise ValueError(f"{path}: truncated snapshot")
    return grid, time, values.reshape(grid.shape).copy()


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(directory: str | Path, config_hash: str, version: str, wall_clock: float,
                   files: list[str]) -> Path:
    directory = Path(directory)
    manifest = {
        "config_hash": config_hash,
        "artifact_version": version,
        "wall_clock_seconds": wall_clock,
        "files": {name: sha256_file(directory / name) for name in sorted(files)},
    }
    path = directory / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def verify_manifest(directory: str | Path) -> bool:
    directory = Path(directory)
    manifest = json.loads((directory / "manifest.json").read_text())
    return all(sha256_file(directory / name) == digest for name, digest in manifest["files"].items())
