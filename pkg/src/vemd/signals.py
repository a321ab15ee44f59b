"""Vector-valued signals, projections and local extrema."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NormalizationError, ShapeError, TooShortError

__all__ = [
    "VectorSignal",
    "ExtremaSet",
    "as_array",
    "project",
    "find_extrema",
    "extrema_count",
]

ALLOWED_DIMS = (1, 3)


@dataclass(frozen=True, eq=False)
class VectorSignal:
    """``d`` channels sampled on a shared uniform grid ``t0 + i*dt``.

    ``data`` is stored read-only with shape ``(d, T)``.
    """

    data: np.ndarray
    dt: float = 1.0
    t0: float = 0.0

    def __post_init__(self):
        a = np.array(self.data, dtype=float, copy=True)
        if a.ndim == 1:
            a = a[np.newaxis, :]
        if a.ndim != 2:
            raise ShapeError(f"expected (d, T) samples, got shape {a.shape}")
        if a.shape[0] not in ALLOWED_DIMS:
            raise ShapeError(f"channel count must be one of {ALLOWED_DIMS}, got {a.shape[0]}")
        if a.shape[1] < 2:
            raise TooShortError("a signal needs at least two samples")
        if not np.all(np.isfinite(a)):
            raise ValueError("signal samples must be finite")
        if not (self.dt > 0 and np.isfinite(self.dt)):
            raise ValueError(f"dt must be positive, got {self.dt}")
        a.setflags(write=False)
        object.__setattr__(self, "data", a)

    @property
    def d(self) -> int:
        return self.data.shape[0]

    @property
    def T(self) -> int:
        return self.data.shape[1]

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.T)

    def with_data(self, data: np.ndarray) -> "VectorSignal":
        """Same grid, new samples."""
        return VectorSignal(data, dt=self.dt, t0=self.t0)


def as_array(x) -> np.ndarray:
    """Samples of a VectorSignal or array-like as a 2-D ``(d, T)`` float array."""
    if isinstance(x, VectorSignal):
        return x.data
    a = np.asarray(x, dtype=float)
    if a.ndim == 1:
        a = a[np.newaxis, :]
    return a


@dataclass(frozen=True)
class ExtremaSet:
    maxima: np.ndarray
    minima: np.ndarray

    @property
    def count(self) -> int:
        return len(self.maxima) + len(self.minima)


def _check_direction(p, d: int) -> np.ndarray:
    p = np.asarray(p, dtype=float).ravel()
    if p.shape[0] != d:
        raise ShapeError(f"direction has dimension {p.shape[0]}, signal has {d} channels")
    if abs(np.linalg.norm(p) - 1.0) > 1e-9:
        raise NormalizationError(f"direction must be a unit vector, |p| = {np.linalg.norm(p)}")
    return p


def project(F, p) -> np.ndarray:
    """1-D signal ``sum_c p[c] * F[c]``."""
    a = as_array(F)
    p = _check_direction(p, a.shape[0])
    return p @ a


def find_extrema(s) -> ExtremaSet:
    """Indices of the strict interior maxima and minima of a 1-D signal.

    A run of equal samples whose neighbours on both sides are strictly smaller
    (larger) counts as one maximum (minimum) located at the first index of the
    run. Runs touching either end of the signal never count.
    """
    s = np.asarray(s, dtype=float).ravel()
    if s.shape[0] < 3:
        raise TooShortError("extrema detection needs at least 3 samples")
    # first index of each run of equal values
    starts = np.flatnonzero(np.r_[True, s[1:] != s[:-1]])
    vals = s[starts]
    if len(vals) < 3:
        empty = np.array([], dtype=int)
        return ExtremaSet(empty, empty.copy())
    left = vals[1:-1] - vals[:-2]
    right = vals[1:-1] - vals[2:]
    inner = starts[1:-1]
    maxima = inner[(left > 0) & (right > 0)]
    minima = inner[(left < 0) & (right < 0)]
    return ExtremaSet(maxima.astype(int), minima.astype(int))


def extrema_count(F, dirs) -> int:
    """Largest number of extrema (maxima plus minima) over all projections."""
    a = as_array(F)
    if a.shape[1] < 3:
        return 0
    best = 0
    for p in dirs:
        best = max(best, find_extrema(project(a, p)).count)
    return best
