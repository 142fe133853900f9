"""File formats: snapshot CSV and JSON encodings of complex results.

Snapshot CSV layout: header ``t,x1,...,xM``; row ``n`` holds the sample time
followed by the M field values.  Floats are written with 17 significant
digits so a read/write round trip reproduces doubles exactly.  Complex
numbers in JSON are ``{"re": ..., "im": ...}`` objects, never strings.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .model import SnapshotSet


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_snapshot_csv(path, snap: SnapshotSet) -> None:
    """Write a snapshot set in the ``t,x1,...,xM`` format."""
    path = Path(path)
    m = snap.n_space
    header = "t," + ",".join(f"x{i}" for i in range(1, m + 1))
    lines = [header]
    for t, row in zip(snap.times, snap.data):
        lines.append(",".join([_fmt(t)] + [_fmt(v) for v in row]))
    path.write_text("\n".join(lines) + "\n")


def read_snapshot_csv(path) -> SnapshotSet:
    """Parse a snapshot CSV back into a SnapshotSet."""
    path = Path(path)
    with path.open() as fh:
        header = fh.readline().strip()
        if not header.startswith("t,"):
            raise ValueError(f"{path}: expected header starting with 't,'")
        n_cols = len(header.split(","))
        times = []
        rows = []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != n_cols:
                raise ValueError(f"{path}:{lineno}: expected {n_cols} columns")
            values = [float(p) for p in parts]
            times.append(values[0])
            rows.append(values[1:])
    return SnapshotSet(np.asarray(times), np.asarray(rows))


def complex_to_json(z) -> dict:
    return {"re": float(np.real(z)), "im": float(np.imag(z))}


def complex_vector_to_json(v) -> list[dict]:
    return [complex_to_json(z) for z in np.asarray(v).ravel()]


def complex_matrix_to_json(a) -> list[list[dict]]:
    return [[complex_to_json(z) for z in row] for row in np.asarray(a)]


def json_to_complex_vector(items) -> np.ndarray:
    return np.array([complex(d["re"], d["im"]) for d in items])


def write_json(path, payload) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def read_json(path):
    return json.loads(Path(path).read_text())
