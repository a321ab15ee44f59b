"""Ensemble local means, sifting and the full IMF extraction loop.

Two local-mean operators share one loop:

* ``memd`` splines every channel through the extrema of each projection;
* ``vemd`` splines the projected signal and lifts its envelopes back with
  :func:`vemd.backprojection.solve_backprojection`.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .backprojection import vemd_envelopes
from .directions import DirectionSet, axis_directions, direction_set
from .envelope import BOUNDARIES, envelopes_memd
from .errors import (
    InconsistentConstraintsError,
    InsufficientExtremaError,
    NoExtremaError,
    ShapeError,
    SingularSystemError,
)
from .signals import VectorSignal, as_array, extrema_count, find_extrema

__all__ = [
    "SiftConfig",
    "EnsembleMean",
    "SiftDiagnostics",
    "Decomposition",
    "directions_for",
    "ensemble_mean",
    "local_mean",
    "sd_criterion",
    "sift",
    "decompose",
]

log = logging.getLogger(__name__)

METHODS = ("memd", "vemd")
# guards pathological inputs when no IMF cap is given
_IMF_SAFETY_CAP = 100


@dataclass(frozen=True)
class SiftConfig:
    """Parameters of the decomposition.

    ``max_imfs`` is the stopping index J: extraction stops once the IMF
    index reaches J, so at most ``J - 1`` IMFs are produced and the residual
    holds the rest. ``None`` means run until the residual has fewer than two
    extrema.
    """

    method: str = "memd"
    directions: int = 512
    base: int = 2
    order: int = 2
    theta1: float = 0.05
    theta2: float = 0.5
    alpha: float = 0.05
    max_sift: int = 100
    max_imfs: int | None = None
    solver: str = "reduced"
    boundary: str = "odd"
    workers: int = 1

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if not (0 < self.theta1 < self.theta2):
            raise ValueError("thresholds must satisfy 0 < theta1 < theta2")
        if not (0 < self.alpha < 1):
            raise ValueError("alpha must lie in (0, 1)")
        if self.max_sift < 1 or self.directions < 1 or self.workers < 1:
            raise ValueError("max_sift, directions and workers must be >= 1")
        if self.max_imfs is not None and self.max_imfs < 1:
            raise ValueError("max_imfs must be >= 1")
        if self.order not in (1, 2, 3):
            raise ValueError(f"order must be 1, 2 or 3, got {self.order}")
        if self.boundary not in BOUNDARIES:
            raise ValueError(f"boundary must be one of {BOUNDARIES}, got {self.boundary!r}")
        if self.solver not in ("kkt", "reduced"):
            raise ValueError(f"solver must be 'kkt' or 'reduced', got {self.solver!r}")

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def directions_for(d: int, cfg: SiftConfig) -> DirectionSet:
    """Hammersley directions for 3 channels, the unit axis for 1 channel."""
    if d == 1:
        return axis_directions(1)
    if d == 3:
        return direction_set(cfg.directions, cfg.base)
    raise ShapeError(f"unsupported channel count {d}")


class _NeumaierSum:
    """Element-wise compensated running sum of equally shaped arrays."""

    def __init__(self, shape):
        self.total = np.zeros(shape)
        self.comp = np.zeros(shape)

    def add(self, x: np.ndarray) -> None:
        t = self.total + x
        big = np.abs(self.total) >= np.abs(x)
        self.comp += np.where(big, (self.total - t) + x, (x - t) + self.total)
        self.total = t

    @property
    def value(self) -> np.ndarray:
        return self.total + self.comp


@dataclass(frozen=True)
class EnsembleMean:
    """Ensemble-averaged envelopes of one sifting step.

    ``amplitude[i]`` is the direction average of ``|U(i) - V(i)| / 2``.
    """

    mean: np.ndarray
    amplitude: np.ndarray
    used: int
    skipped: int


def _direction_envelopes(H: np.ndarray, p: np.ndarray, cfg: SiftConfig):
    ex = find_extrema(p @ H)
    try:
        if cfg.method == "memd":
            env = envelopes_memd(H, ex, cfg.boundary)
        else:
            env = vemd_envelopes(H, p, ex, cfg.order, cfg.boundary, cfg.solver)
        return env.upper, env.lower
    except (InsufficientExtremaError, SingularSystemError, InconsistentConstraintsError):
        return None


def ensemble_mean(H, dirs: DirectionSet, cfg: SiftConfig) -> EnsembleMean:
    """Average of ``(U + V) / 2`` over the directions that yield envelopes.

    Directions with fewer than two maxima or minima, or whose lifting
    problem fails, are skipped; the divisor counts only the used ones.
    Reduction runs in direction order, so results do not depend on
    ``cfg.workers``.
    """
    H = as_array(H)
    if dirs.dim != H.shape[0]:
        raise ShapeError(f"directions live in R^{dirs.dim}, signal has {H.shape[0]} channels")
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(lambda p: _direction_envelopes(H, p, cfg), dirs))
    else:
        results = [_direction_envelopes(H, p, cfg) for p in dirs]

    acc = _NeumaierSum(H.shape)
    amp = _NeumaierSum(H.shape[1])
    used = 0
    for res in results:
        if res is None:
            continue
        upper, lower = res
        acc.add(upper + lower)
        amp.add(0.5 * np.linalg.norm(upper - lower, axis=0))
        used += 1
    if used == 0:
        raise NoExtremaError("no projection direction has 2 maxima and 2 minima")
    return EnsembleMean(acc.value / (2.0 * used), amp.value / used, used, len(results) - used)


def local_mean(H, dirs: DirectionSet, cfg: SiftConfig) -> np.ndarray:
    return ensemble_mean(H, dirs, cfg).mean


def sd_criterion(mean, amplitude, cfg: SiftConfig) -> tuple[bool, float]:
    """Two-threshold stopping test on the mean-to-amplitude ratio.

    ``sigma = |mean| / amplitude`` per sample. Sifting stops when sigma is
    below ``theta1`` on all but a fraction ``alpha`` of the samples and below
    ``theta2`` everywhere. Returns ``(stop, mean(sigma))``.
    """
    m = np.linalg.norm(np.atleast_2d(mean), axis=0)
    a = np.asarray(amplitude, dtype=float)
    if m.shape != a.shape:
        raise ShapeError(f"mean has {m.shape[0]} samples, amplitude has {a.shape[0]}")
    with np.errstate(divide="ignore", invalid="ignore"):
        sigma = np.where(a > 0, m / np.where(a > 0, a, 1.0), np.where(m > 0, np.inf, 0.0))
    stop = bool(np.mean(sigma >= cfg.theta1) <= cfg.alpha and np.all(sigma < cfg.theta2))
    return stop, float(np.mean(sigma))


@dataclass
class SiftDiagnostics:
    iterations: int = 0
    skipped_directions: int = 0
    sd_trace: list[float] = field(default_factory=list)
    converged: bool = False

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "skipped_directions": self.skipped_directions,
            "sd_trace": list(self.sd_trace),
            "final_sd": self.sd_trace[-1] if self.sd_trace else None,
            "converged": self.converged,
        }


def sift(H, dirs: DirectionSet, cfg: SiftConfig) -> tuple[np.ndarray, SiftDiagnostics]:
    """Extract one IMF by repeated local-mean subtraction.

    Each pass computes the ensemble mean of the current curve; if the
    stopping test passes the curve is returned as is, otherwise the mean is
    subtracted. At most ``cfg.max_sift`` subtractions are made. Raises
    :class:`NoExtremaError` only if the very first mean cannot be formed.
    """
    H = np.array(as_array(H), dtype=float)
    diag = SiftDiagnostics()
    while True:
        try:
            ens = ensemble_mean(H, dirs, cfg)
        except NoExtremaError:
            if diag.iterations == 0:
                raise
            break
        diag.skipped_directions += ens.skipped
        stop, sd = sd_criterion(ens.mean, ens.amplitude, cfg)
        diag.sd_trace.append(sd)
        if stop:
            diag.converged = True
            break
        if diag.iterations >= cfg.max_sift:
            break
        H = H - ens.mean
        diag.iterations += 1
    return H, diag


@dataclass
class Decomposition:
    imfs: list[VectorSignal]
    residual: VectorSignal
    diagnostics: list[SiftDiagnostics]

    @property
    def n_imfs(self) -> int:
        return len(self.imfs)

    def reconstruct(self) -> np.ndarray:
        total = self.residual.data.copy()
        for imf in self.imfs:
            total = total + imf.data
        return total


def decompose(F, cfg: SiftConfig | None = None) -> Decomposition:
    """Split ``F`` into IMFs plus a residual with ``F = sum(imfs) + residual``.

    Stops when the residual shows fewer than two extrema in every projection,
    when no projection supports a local mean, or when the IMF index reaches
    ``cfg.max_imfs``.
    """
    cfg = cfg or SiftConfig()
    if not isinstance(F, VectorSignal):
        F = VectorSignal(F)
    dirs = directions_for(F.d, cfg)
    R = F.data.copy()
    imfs: list[VectorSignal] = []
    diags: list[SiftDiagnostics] = []
    j = 1
    while j < _IMF_SAFETY_CAP:
        if cfg.max_imfs is not None and j >= cfg.max_imfs:
            break
        if extrema_count(R, dirs) < 2:
            break
        try:
            imf, diag = sift(R, dirs, cfg)
        except NoExtremaError:
            break
        log.info("IMF %d: %d sifts, converged=%s", j, diag.iterations, diag.converged)
        imfs.append(F.with_data(imf))
        diags.append(diag)
        R = R - imf
        j += 1
    return Decomposition(imfs, F.with_data(R), diags)
