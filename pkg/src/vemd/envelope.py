"""Cubic-spline envelopes through extrema.

Knots are extended past both ends of the grid before splining so the
envelopes are interpolated, not extrapolated, near the boundaries. Two
end treatments are available:

``"odd"`` (default)
    point reflection through the end sample: a minimum at ``t`` with value
    ``z`` becomes an upper knot at ``-t`` with value ``2*z(0) - z``. This
    keeps the local slope of the signal across the boundary.
``"even"``
    plain mirror: a maximum at ``t`` reappears at ``-t`` with its value.

Both are linear in the sample values, so splining channel by channel and
then projecting gives the same curve as splining the projection.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import BoundaryError, InsufficientExtremaError, InvalidKnotsError
from .signals import ExtremaSet, as_array

__all__ = [
    "SplineKnots",
    "EnvelopePair",
    "MIRROR_COUNT",
    "BOUNDARIES",
    "mirror_extend",
    "antisymmetric_extend",
    "envelope_knots",
    "cubic_spline_eval",
    "envelopes_1d",
    "envelopes_memd",
]

MIRROR_COUNT = 2
BOUNDARIES = ("odd", "even")


@dataclass(frozen=True)
class SplineKnots:
    """Knot positions (grid index units) and values.

    ``values`` is 1-D with one entry per knot, or 2-D ``(channels, knots)``.
    """

    positions: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float).ravel()
        val = np.asarray(self.values, dtype=float)
        if val.shape[-1] != pos.shape[0]:
            raise InvalidKnotsError(
                f"{pos.shape[0]} knot positions but {val.shape[-1]} values per channel"
            )
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "values", val)

    def __len__(self) -> int:
        return self.positions.shape[0]

    def project(self, p) -> "SplineKnots":
        """Knots of the projected values ``p . values``."""
        return SplineKnots(self.positions, np.asarray(p, dtype=float) @ self.values)


@dataclass(frozen=True)
class EnvelopePair:
    upper: np.ndarray
    lower: np.ndarray

    @property
    def mean(self) -> np.ndarray:
        return 0.5 * (self.upper + self.lower)


def mirror_extend(knots: SplineKnots, T: int, count: int = MIRROR_COUNT) -> SplineKnots:
    """Reflect ``count`` knots across each end of the domain ``[0, T-1]``.

    Values are copied. A knot sitting exactly on a boundary is not
    reflected (it would coincide with itself); the next interior knot is
    used instead.
    """
    if len(knots) < 2:
        raise BoundaryError("need at least 2 knots to mirror")
    if count < 1:
        raise ValueError(f"mirror count must be >= 1, got {count}")
    pos, val = knots.positions, knots.values
    hi = float(T - 1)

    left = np.flatnonzero(pos > 0.0)[:count]
    right = np.flatnonzero(pos < hi)[::-1][:count]

    new_pos = np.concatenate([-pos[left][::-1], pos, 2.0 * hi - pos[right]])
    new_val = np.concatenate([val[..., left[::-1]], val, val[..., right]], axis=-1)
    return SplineKnots(new_pos, new_val)


def antisymmetric_extend(own, other, Z, count: int = MIRROR_COUNT) -> SplineKnots:
    """Envelope knots at ``own`` extended by point-reflected ``other`` extrema.

    ``Z`` holds the samples (1-D, or ``(channels, T)``). Near each end the
    first ``count`` extrema of the opposite kind are reflected through the
    end sample ``(0, Z[0])`` resp. ``(T-1, Z[-1])``.
    """
    own = np.asarray(own, dtype=int)
    other = np.asarray(other, dtype=int)
    if len(own) < 2 or len(other) < 1:
        raise BoundaryError("need at least 2 own and 1 opposite extrema to reflect")
    Z = np.asarray(Z, dtype=float)
    T = Z.shape[-1]
    left = other[:count][::-1]
    right = other[-count:][::-1]
    left = left[left > 0]
    right = right[right < T - 1]
    pos = np.concatenate([-left, own, 2 * (T - 1) - right])
    val = np.concatenate(
        [
            2.0 * Z[..., [0]] - Z[..., left],
            Z[..., own],
            2.0 * Z[..., [T - 1]] - Z[..., right],
        ],
        axis=-1,
    )
    return SplineKnots(pos, val)


def envelope_knots(Z, ex: ExtremaSet, boundary: str = "odd") -> tuple[SplineKnots, SplineKnots]:
    """Extended (upper, lower) knot sets for samples ``Z`` and extrema ``ex``.

    Positions are integers (possibly outside ``[0, T-1]``) and depend only on
    ``ex``; values are linear in ``Z``.
    """
    if len(ex.maxima) < 2 or len(ex.minima) < 2:
        raise InsufficientExtremaError(
            f"{len(ex.maxima)} maxima and {len(ex.minima)} minima; need 2 of each"
        )
    Z = np.asarray(Z, dtype=float)
    T = Z.shape[-1]
    if boundary == "odd":
        return (
            antisymmetric_extend(ex.maxima, ex.minima, Z),
            antisymmetric_extend(ex.minima, ex.maxima, Z),
        )
    if boundary == "even":
        return (
            mirror_extend(SplineKnots(ex.maxima, Z[..., ex.maxima]), T),
            mirror_extend(SplineKnots(ex.minima, Z[..., ex.minima]), T),
        )
    raise ValueError(f"boundary must be one of {BOUNDARIES}, got {boundary!r}")


def cubic_spline_eval(knots: SplineKnots, grid) -> np.ndarray:
    """Natural cubic spline through ``knots`` evaluated on ``grid``.

    Two knots give the straight line through them. Output has the channel
    layout of ``knots.values``.
    """
    pos = knots.positions
    if len(pos) < 2:
        raise InvalidKnotsError("a spline needs at least 2 knots")
    if np.any(np.diff(pos) <= 0):
        raise InvalidKnotsError("knot positions must be strictly increasing")
    grid = np.asarray(grid, dtype=float)
    val = knots.values
    if len(pos) == 2:
        slope = (val[..., 1] - val[..., 0]) / (pos[1] - pos[0])
        return val[..., [0]] + np.multiply.outer(slope, grid - pos[0])
    return CubicSpline(pos, val, axis=-1, bc_type="natural")(grid)


def envelopes_1d(s, ex: ExtremaSet, boundary: str = "odd") -> EnvelopePair:
    """Upper and lower spline envelopes of a 1-D signal on its own grid."""
    s = np.asarray(s, dtype=float).ravel()
    upper, lower = envelope_knots(s, ex, boundary)
    grid = np.arange(s.shape[0])
    return EnvelopePair(cubic_spline_eval(upper, grid), cubic_spline_eval(lower, grid))


def envelopes_memd(H, ex: ExtremaSet, boundary: str = "odd") -> EnvelopePair:
    """Vector-valued envelopes: every channel splined through the same knots."""
    a = as_array(H)
    upper, lower = envelope_knots(a, ex, boundary)
    grid = np.arange(a.shape[1])
    return EnvelopePair(cubic_spline_eval(upper, grid), cubic_spline_eval(lower, grid))
