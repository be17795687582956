"""Report persistence: versioned matrix JSON, CSV streams, run manifests.

Floats go through Python's shortest round-trip ``repr`` in JSON and through
``%.17g`` in CSV, so a reload reproduces every value bit for bit.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from kronvex import __version__
from kronvex.conjecture import MatrixPair

FORMAT = "kronvex-v1"


def _finite(x: float):
    # JSON has no inf/nan; spell them as strings so they survive a round trip.
    x = float(x)
    if math.isfinite(x):
        return x
    return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, MatrixPair):
        return pair_to_json(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _finite(obj)
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    return obj


def matrix_to_json(M) -> dict:
    M = np.asarray(M, dtype=np.complex128)
    if M.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    return {"format": FORMAT, "rows": M.shape[0], "cols": M.shape[1],
            "entries": [[float(z.real), float(z.imag)] for z in M.ravel(order="C")]}


def matrix_from_json(d: dict) -> np.ndarray:
    if d.get("format", FORMAT) != FORMAT:
        raise ValueError(f"unsupported matrix format {d.get('format')!r}")
    rows, cols = int(d["rows"]), int(d["cols"])
    e = np.asarray(d["entries"], dtype=float)
    if e.shape != (rows * cols, 2):
        raise ValueError(f"matrix entries have shape {e.shape}, expected {(rows * cols, 2)}")
    return (e[:, 0] + 1j * e[:, 1]).reshape(rows, cols)


def pair_to_json(p: MatrixPair) -> dict:
    return {"format": FORMAT, "A": matrix_to_json(p.A), "B": matrix_to_json(p.B)}


def pair_from_json(d: dict) -> MatrixPair:
    return MatrixPair(matrix_from_json(d["A"]), matrix_from_json(d["B"]))


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, allow_nan=False) + "\n"


def write_json(path, obj) -> None:
    text = dumps(obj)
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def format_float(x) -> str:
    return format(float(x), ".17g")


def write_csv(fh, header, rows) -> int:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    n = 0
    for row in rows:
        w.writerow([format_float(v) if isinstance(v, (float, np.floating)) else v for v in row])
        n += 1
    return n


def config_digest(config: dict) -> str:
    blob = json.dumps(to_jsonable(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass
class RunManifest:
    command: str
    seed: int
    config: dict
    tool_version: str = __version__
    started_at: str = field(default_factory=_now)
    finished_at: str | None = None
    results: list = field(default_factory=list)

    def add(self, result: dict) -> None:
        self.results.append({"seed": self.seed, **result})

    def finish(self) -> None:
        self.finished_at = _now()

    def to_dict(self) -> dict:
        return {
            "format": FORMAT,
            "tool_version": self.tool_version,
            "command": self.command,
            "seed": self.seed,
            "config": self.config,
            "config_digest": config_digest(self.config),
            "timestamps": {"started_at": self.started_at, "finished_at": self.finished_at},
            "results": self.results,
        }
