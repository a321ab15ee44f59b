"""Signal CSV files, result manifests and the synthetic test signal."""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ShapeError, SignalFileError, TooShortError
from .signals import VectorSignal

__all__ = [
    "Fixture",
    "synth_fixture",
    "read_signal_csv",
    "write_signal_csv",
    "build_manifest",
    "write_manifest",
]

UNIFORMITY_TOL = 1e-9


@dataclass(frozen=True)
class Fixture:
    """``signal = imf + trend`` sampled on ``t_i = i / (T - 1)``."""

    signal: VectorSignal
    imf: VectorSignal
    trend: VectorSignal


def synth_fixture(T: int = 1000) -> Fixture:
    """Three-channel AM tone at 10 Hz riding on a shared 2 Hz sine.

    imf:   ``(k + cos(2 k pi t)) sin(20 pi t)`` for channel ``k = 1, 2, 3``
    trend: ``k sin(4 pi t)``
    """
    if T < 64:
        raise ValueError(f"fixture needs at least 64 samples, got {T}")
    t = np.arange(T) / (T - 1)
    k = np.arange(1, 4)[:, np.newaxis]
    carrier = np.sin(20 * np.pi * t)
    imf = (k + np.cos(2 * k * np.pi * t)) * carrier
    trend = k * np.sin(4 * np.pi * t)
    dt = 1.0 / (T - 1)
    return Fixture(
        VectorSignal(imf + trend, dt=dt),
        VectorSignal(imf, dt=dt),
        VectorSignal(trend, dt=dt),
    )


def write_signal_csv(path, signal: VectorSignal) -> Path:
    """Write ``t,f1,...,fd`` rows with 17 significant digits."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = ["t"] + [f"f{c + 1}" for c in range(signal.d)]
    table = np.vstack([signal.times, signal.data]).T
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in table:
            writer.writerow([f"{v:.17g}" for v in row])
    return path


def read_signal_csv(path) -> VectorSignal:
    """Parse a signal CSV; the time column must be strictly increasing and uniform."""
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise SignalFileError(f"cannot read {path}: {exc}") from exc
    rows = [r for r in rows if r]
    if not rows:
        raise SignalFileError(f"{path} is empty")
    header = [h.strip() for h in rows[0]]
    if len(header) < 2 or header[0] != "t":
        raise SignalFileError(f"{path}: header must be 't,f1,...,fd', got {','.join(header)}")
    try:
        table = np.array([[float(x) for x in r] for r in rows[1:]], dtype=float)
    except ValueError as exc:
        raise SignalFileError(f"{path}: {exc}") from exc
    if table.ndim != 2 or table.shape[1] != len(header):
        raise SignalFileError(f"{path}: every row needs {len(header)} fields")
    if not np.all(np.isfinite(table)):
        raise SignalFileError(f"{path}: non-finite values")
    if table.shape[0] < 2:
        raise SignalFileError(f"{path}: need at least 2 samples")
    t = table[:, 0]
    steps = np.diff(t)
    dt = (t[-1] - t[0]) / (len(t) - 1)
    if np.any(steps <= 0):
        raise SignalFileError(f"{path}: time column must be strictly increasing")
    if np.max(np.abs(steps - dt)) > UNIFORMITY_TOL * dt:
        raise SignalFileError(f"{path}: time grid is not uniform")
    try:
        return VectorSignal(table[:, 1:].T, dt=dt, t0=t[0])
    except (ShapeError, TooShortError) as exc:
        raise SignalFileError(f"{path}: {exc}") from exc


def build_manifest(*, config: dict, signal: VectorSignal, input_path=None,
                   imf_paths=(), residual_path=None, diagnostics=(),
                   metrics=None, root=None) -> dict:
    def rel(p):
        p = Path(p)
        return str(p.relative_to(root)) if root is not None else str(p)

    return {
        "version": __version__,
        "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "input": str(input_path) if input_path is not None else None,
        "config": config,
        "signal": {"channels": signal.d, "samples": signal.T, "dt": signal.dt, "t0": signal.t0},
        "imfs": [
            {"index": i + 1, "path": rel(p), "rows": signal.T}
            for i, p in enumerate(imf_paths)
        ],
        "residual": {"path": rel(residual_path), "rows": signal.T} if residual_path else None,
        "diagnostics": [d.to_dict() for d in diagnostics],
        "metrics": metrics or {},
    }


def write_manifest(path, manifest: dict) -> Path:
    path = Path(path)
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path
