"""Error metrics and the local-mean parameter sweeps."""
from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .directions import direction_set, is_prime
from .errors import InvalidBaseError, ShapeError, UndefinedMetricError
from .signals import as_array
from .sifting import SiftConfig, local_mean

__all__ = [
    "OPERATORS",
    "SweepResult",
    "prd",
    "prd_per_channel",
    "projection_residual",
    "primes_between",
    "operator_config",
    "sweep_directions",
    "sweep_base",
]

# local-mean operators compared in the experiments
OPERATORS = {
    "memd": SiftConfig(method="memd"),
    "vemd2": SiftConfig(method="vemd", order=2),
    "vemd3": SiftConfig(method="vemd", order=3),
}


def prd(approx, reference) -> float:
    """Percent root-mean-square difference, norms taken over all channels jointly."""
    a, r = as_array(approx), as_array(reference)
    if a.shape != r.shape:
        raise ShapeError(f"shape mismatch {a.shape} vs {r.shape}")
    ref = np.linalg.norm(r)
    if ref == 0:
        raise UndefinedMetricError("reference signal has zero norm")
    return float(100.0 * np.linalg.norm(a - r) / ref)


def prd_per_channel(approx, reference) -> list[float]:
    a, r = as_array(approx), as_array(reference)
    return [prd(a[c], r[c]) for c in range(a.shape[0])]


def projection_residual(env, p, env1d) -> float:
    """``max_t |p . env(t) - env1d(t)|``."""
    e = as_array(env)
    u = np.asarray(env1d, dtype=float).ravel()
    proj = np.asarray(p, dtype=float) @ e
    if proj.shape != u.shape:
        raise ShapeError(f"shape mismatch {proj.shape} vs {u.shape}")
    return float(np.max(np.abs(proj - u), initial=0.0))


def primes_between(lo: int, hi: int) -> list[int]:
    return [b for b in range(max(lo, 2), hi + 1) if is_prime(b)]


def operator_config(name: str, **overrides) -> SiftConfig:
    try:
        cfg = OPERATORS[name]
    except KeyError:
        raise ValueError(f"unknown operator {name!r}; choose from {sorted(OPERATORS)}") from None
    return replace(cfg, **overrides) if overrides else cfg


@dataclass
class SweepResult:
    """PRD of each local-mean operator against a reference over a parameter grid."""

    kind: str
    params: list[int]
    methods: list[str]
    prd: dict[str, list[float]] = field(default_factory=dict)
    seconds: dict[str, list[float]] = field(default_factory=dict)

    def rows(self):
        for i, value in enumerate(self.params):
            for m in self.methods:
                yield value, m, self.prd[m][i], self.seconds[m][i]

    def spread(self, method: str) -> float:
        vals = self.prd[method]
        return max(vals) - min(vals) if vals else 0.0


def _sweep(kind, F, reference, grid, make_dirs, methods, overrides) -> SweepResult:
    out = SweepResult(kind, list(grid), list(methods))
    for m in methods:
        cfg = operator_config(m, **overrides)
        out.prd[m], out.seconds[m] = [], []
        for value in grid:
            dirs = make_dirs(value)
            start = time.perf_counter()
            mean = local_mean(F, dirs, cfg)
            out.seconds[m].append(time.perf_counter() - start)
            out.prd[m].append(prd(mean, reference))
    return out


def sweep_directions(F, reference, M_list, b: int = 2,
                     methods=tuple(OPERATORS), **overrides) -> SweepResult:
    """PRD of one local-mean pass versus the number of directions M."""
    return _sweep("directions", F, reference, M_list,
                  lambda M: direction_set(int(M), b), methods, overrides)


def sweep_base(F, reference, M: int, b_list,
               methods=tuple(OPERATORS), **overrides) -> SweepResult:
    """PRD of one local-mean pass versus the Hammersley prime base b."""
    for b in b_list:
        if not is_prime(int(b)):
            raise InvalidBaseError(f"base {b} is not prime")
    return _sweep("base", F, reference, b_list,
                  lambda b: direction_set(M, int(b)), methods, overrides)
