"""Quasi-uniform projection directions on the unit sphere.

Directions come from Hammersley points ``(m/M, z_b(m))`` pushed through the
area-preserving cylinder-to-sphere map.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import EmptySetError, InvalidBaseError

__all__ = [
    "HammersleyPoint",
    "DirectionSet",
    "is_prime",
    "radical_inverse",
    "hammersley_set",
    "to_sphere",
    "direction_set",
    "axis_directions",
]


def is_prime(b: int) -> bool:
    if b < 2:
        return False
    if b % 2 == 0:
        return b == 2
    k = 3
    while k * k <= b:
        if b % k == 0:
            return False
        k += 2
    return True


def _check_base(b: int) -> None:
    if not isinstance(b, (int, np.integer)) or not is_prime(int(b)):
        raise InvalidBaseError(f"base must be a prime >= 2, got {b!r}")


def radical_inverse(m: int, b: int) -> float:
    """Van der Corput radical inverse of ``m`` in base ``b``.

    The base-``b`` digits of ``m`` are mirrored about the radix point, so
    ``m = sum c_j b**j`` maps to ``sum c_j b**(-j-1)``. The digit sum is
    accumulated as an exact fraction and rounded once.
    """
    _check_base(b)
    if m < 0:
        raise ValueError(f"index must be non-negative, got {m}")
    num, den = 0, 1
    m = int(m)
    while m > 0:
        m, digit = divmod(m, b)
        num = num * b + digit
        den *= b
    return float(Fraction(num, den)) if num else 0.0


@dataclass(frozen=True)
class HammersleyPoint:
    u: float
    v: float


def hammersley_set(M: int, b: int) -> list[HammersleyPoint]:
    """The M-point Hammersley set ``{(m/M, z_b(m)) : m = 0..M-1}``."""
    _check_base(b)
    if M < 1:
        raise EmptySetError(f"need at least one point, got M={M}")
    return [HammersleyPoint(m / M, radical_inverse(m, b)) for m in range(M)]


def to_sphere(point: HammersleyPoint) -> np.ndarray:
    phi = 2.0 * np.pi * point.u
    z = 2.0 * point.v - 1.0
    r = np.sqrt(max(0.0, 1.0 - z * z))
    return np.array([r * np.cos(phi), r * np.sin(phi), z])


@dataclass(frozen=True, eq=False)
class DirectionSet:
    """An ordered, immutable set of unit projection directions.

    ``vectors`` has shape ``(count, dim)``. ``base`` is ``None`` for sets that
    were not built from Hammersley points (e.g. the single axis used for
    one-channel signals).
    """

    vectors: np.ndarray
    base: int | None = None

    def __post_init__(self):
        v = np.array(self.vectors, dtype=float, copy=True)
        if v.ndim != 2 or v.shape[0] < 1:
            raise EmptySetError("direction set must hold at least one vector")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @property
    def count(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return self.count

    def __iter__(self):
        return iter(self.vectors)

    def __getitem__(self, i):
        return self.vectors[i]


def direction_set(M: int, b: int = 2) -> DirectionSet:
    """M unit vectors in R^3 from the base-``b`` Hammersley set."""
    points = hammersley_set(M, b)
    return DirectionSet(np.array([to_sphere(pt) for pt in points]), base=int(b))


def axis_directions(d: int) -> DirectionSet:
    """The single direction ``e_1`` in R^d; the only sensible choice for d = 1."""
    v = np.zeros((1, d))
    v[0, 0] = 1.0
    return DirectionSet(v)
