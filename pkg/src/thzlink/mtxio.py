"""CSV + sidecar import/export for channel and precoder matrices.

A matrix file carries `row,col,re,im` records; its metadata (frequency,
distance, kind, seed...) travels in a JSON sidecar at <path>.meta.json so
the data file stays a plain table.
"""

from __future__ import annotations

import json
import pathlib

import numpy as np

from .channel import ChannelMatrix
from .errors import ThzLinkError

MATRIX_HEADER = "row,col,re,im"


def save_matrix_csv(path, matrix, metadata=None):
    """Write a complex matrix and its sidecar; returns the sidecar path."""
    path = pathlib.Path(path)
    matrix = np.asarray(matrix, dtype=complex)
    lines = [MATRIX_HEADER]
    for i in range(matrix.shape[0]):
        for j in range(matrix.shape[1]):
            v = matrix[i, j]
            lines.append(f"{i},{j},{v.real:.17g},{v.imag:.17g}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    meta = dict(metadata or {})
    meta["shape"] = list(matrix.shape)
    sidecar = path.with_name(path.name + ".meta.json")
    sidecar.write_text(json.dumps(meta, sort_keys=True, indent=1) + "\n")
    return sidecar


def load_matrix_csv(path):
    """Read a matrix file; returns (matrix, metadata dict)."""
    path = pathlib.Path(path)
    sidecar = path.with_name(path.name + ".meta.json")
    meta = {}
    if sidecar.exists():
        meta = json.loads(sidecar.read_text())
    rows = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != MATRIX_HEADER:
            raise ThzLinkError(f"expected header '{MATRIX_HEADER}', got '{header}'")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            i, j, re, im = line.split(",")
            rows.append((int(i), int(j), float(re), float(im)))
    if "shape" in meta:
        n_r, n_c = meta["shape"]
    else:
        n_r = max(r[0] for r in rows) + 1
        n_c = max(r[1] for r in rows) + 1
    matrix = np.zeros((n_r, n_c), dtype=complex)
    for i, j, re, im in rows:
        matrix[i, j] = re + 1j * im
    return matrix, meta


def save_channel_csv(path, cm: ChannelMatrix, seed=None):
    meta = {
        "frequency_hz": cm.frequency,
        "distance_m": cm.distance,
        "kind": cm.kind,
    }
    if seed is not None:
        meta["seed"] = seed
    return save_matrix_csv(path, cm.entries, meta)


def load_channel_csv(path) -> ChannelMatrix:
    matrix, meta = load_matrix_csv(path)
    return ChannelMatrix(
        entries=matrix,
        frequency=meta.get("frequency_hz", 0.0),
        distance=meta.get("distance_m", 0.0),
        kind=meta.get("kind", "LoS"),
    )
