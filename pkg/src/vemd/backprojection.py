"""Lifting 1-D projected envelopes back to d-D envelopes.

Given a direction ``p``, a 1-D envelope ``u`` and anchor samples ``H(t_k)``,
find the d-channel curve ``U`` minimizing ``sum_c ||D_n U_c||^2`` subject to
``p . U(t) = u(t)`` for every sample and ``U(t_k) = H(t_k)`` at the anchors.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from math import comb

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .envelope import EnvelopePair, SplineKnots, cubic_spline_eval, envelope_knots
from .errors import (
    InconsistentConstraintsError,
    ShapeError,
    SingularSystemError,
    TooShortError,
)

__all__ = [
    "DiffOperator",
    "BackProjectionProblem",
    "QuadraticProgram",
    "diff_operator",
    "sobolev",
    "assemble",
    "solve_backprojection",
    "solve_kkt",
    "solve_reduced",
    "orthogonal_complement",
    "lift_envelope",
    "vemd_envelopes",
]

log = logging.getLogger(__name__)

FEASIBILITY_TOL = 1e-8
CONSISTENCY_TOL = 1e-8
REGULARIZATION = 1e-10


@dataclass(frozen=True)
class DiffOperator:
    order: int
    rows: sp.csr_matrix

    def __matmul__(self, x):
        return self.rows @ x

    def toarray(self) -> np.ndarray:
        return self.rows.toarray()


def diff_operator(n: int, T: int) -> DiffOperator:
    """Unscaled n-th order forward difference matrix of shape ``(T-n, T)``."""
    if not 1 <= n <= 3:
        raise ValueError(f"derivative order must be 1, 2 or 3, got {n}")
    if T <= n:
        raise TooShortError(f"need more than {n} samples for order {n}, got {T}")
    stencil = [comb(n, j) * (-1) ** (n - j) for j in range(n + 1)]
    rows = sp.diags(stencil, list(range(n + 1)), shape=(T - n, T), format="csr")
    return DiffOperator(n, rows)


def sobolev(X, n: int) -> float:
    """Sum over channels of the squared norm of the n-th difference."""
    a = np.atleast_2d(np.asarray(getattr(X, "data", X), dtype=float))
    D = diff_operator(n, a.shape[1])
    return float(sum(np.dot(r, r) for r in (D @ a.T).T))


@dataclass(frozen=True, eq=False)
class BackProjectionProblem:
    """One lifting problem (upper or lower envelope) for one direction.

    ``anchor_values`` has shape ``(d, k)``, one column per anchor index.
    """

    direction: np.ndarray
    target: np.ndarray
    anchor_indices: np.ndarray
    anchor_values: np.ndarray
    order: int = 2

    def __post_init__(self):
        p = np.asarray(self.direction, dtype=float).ravel()
        u = np.asarray(self.target, dtype=float).ravel()
        idx = np.asarray(self.anchor_indices, dtype=int).ravel()
        vals = np.atleast_2d(np.asarray(self.anchor_values, dtype=float))
        if vals.shape != (p.shape[0], idx.shape[0]):
            raise ShapeError(
                f"anchor values must be ({p.shape[0]}, {idx.shape[0]}), got {vals.shape}"
            )
        if idx.shape[0] < 2:
            raise ValueError("need at least 2 anchors")
        if np.any(np.diff(idx) <= 0) or idx[0] < 0 or idx[-1] >= u.shape[0]:
            raise ValueError("anchor indices must be strictly increasing and on the grid")
        for name, val in (("direction", p), ("target", u), ("anchor_indices", idx),
                          ("anchor_values", vals)):
            object.__setattr__(self, name, val)

    @property
    def d(self) -> int:
        return self.direction.shape[0]

    @property
    def T(self) -> int:
        return self.target.shape[0]

    def check_consistency(self) -> None:
        gap = self.direction @ self.anchor_values - self.target[self.anchor_indices]
        scale = 1.0 + np.max(np.abs(self.target))
        if np.max(np.abs(gap)) > CONSISTENCY_TOL * scale:
            raise InconsistentConstraintsError(
                f"projected anchors miss the envelope by {np.max(np.abs(gap)):.3e}"
            )


@dataclass(frozen=True)
class QuadraticProgram:
    """``min x'Qx  s.t.  Ax = b`` over the channel-major stacking of U."""

    Q: sp.csc_matrix
    A: sp.csr_matrix
    b: np.ndarray


def assemble(problem: BackProjectionProblem) -> QuadraticProgram:
    """Quadratic objective and equality constraints of a lifting problem.

    Unknown ``c*T + i`` is channel ``c`` at sample ``i``. Projection rows at
    anchor samples are dropped: the anchor rows already imply them.
    """
    problem.check_consistency()
    p, u, idx = problem.direction, problem.target, problem.anchor_indices
    d, T = problem.d, problem.T

    D = diff_operator(problem.order, T).rows
    Q = sp.block_diag([D.T @ D] * d, format="csc")

    free = np.setdiff1d(np.arange(T), idx)
    nfree, nanch = free.shape[0], idx.shape[0]
    proj_rows = np.repeat(np.arange(nfree), d)
    proj_cols = (np.arange(d)[np.newaxis, :] * T + free[:, np.newaxis]).ravel()
    proj_vals = np.tile(p, nfree)
    anch_rows = nfree + np.arange(nanch * d)
    anch_cols = (idx[:, np.newaxis] + np.arange(d)[np.newaxis, :] * T).ravel()
    A = sp.csr_matrix(
        (
            np.concatenate([proj_vals, np.ones(nanch * d)]),
            (np.concatenate([proj_rows, anch_rows]), np.concatenate([proj_cols, anch_cols])),
        ),
        shape=(nfree + nanch * d, d * T),
    )
    b = np.concatenate([u[free], problem.anchor_values.T.ravel()])
    return QuadraticProgram(Q, A, b)


def _shift(Q) -> float:
    """Diagonal shift for the regularized retry, relative to the mean of diag(Q)."""
    scale = Q.diagonal().sum() / Q.shape[0]
    return REGULARIZATION * (scale if scale > 0 else 1.0)


def _kkt_attempt(qp: QuadraticProgram, shift: float):
    n, m = qp.Q.shape[0], qp.A.shape[0]
    H = 2.0 * qp.Q
    if shift:
        H = H + shift * sp.identity(n, format="csc")
    K = sp.bmat([[H, qp.A.T], [qp.A, None]], format="csc")
    rhs = np.concatenate([np.zeros(n), qp.b])
    try:
        sol = spla.splu(K).solve(rhs)
    except RuntimeError:
        return None
    if not np.all(np.isfinite(sol)):
        return None
    x, lam = sol[:n], sol[n:]
    feas = np.max(np.abs(qp.A @ x - qp.b)) if m else 0.0
    if feas > FEASIBILITY_TOL * (1.0 + np.max(np.abs(qp.b), initial=0.0)):
        return None
    grad = H @ x + qp.A.T @ lam
    scale = 1.0 + np.max(np.abs(H @ x)) + np.max(np.abs(qp.A.T @ lam))
    if np.max(np.abs(grad)) > FEASIBILITY_TOL * scale:
        return None
    return x


def solve_kkt(qp: QuadraticProgram) -> np.ndarray:
    """Minimizer of an equality-constrained QP through its KKT system.

    Retries once with ``Q + eps*I`` when the factorization is singular or
    the solution fails the feasibility/stationarity checks.
    """
    x = _kkt_attempt(qp, 0.0)
    if x is None:
        eps = _shift(qp.Q)
        log.debug("KKT solve failed, retrying with shift %.3e", eps)
        x = _kkt_attempt(qp, eps)
    if x is None:
        raise SingularSystemError("KKT system is singular after regularization")
    return x


def orthogonal_complement(p: np.ndarray) -> np.ndarray:
    """Orthonormal basis (as columns) of the hyperplane orthogonal to ``p``."""
    p = np.asarray(p, dtype=float).ravel()
    if p.shape[0] == 1:
        return np.zeros((1, 0))
    return la.null_space(p[np.newaxis, :])


def _banded_minimizer(G: sp.csr_matrix, free: np.ndarray, fixed: np.ndarray,
                      fixed_vals: np.ndarray, bandwidth: int) -> np.ndarray:
    """Minimize ``w'Gw`` over the free entries with ``w[fixed] = fixed_vals``.

    ``fixed_vals`` is ``(k, r)`` for ``r`` right-hand sides sharing the anchors.
    """
    Gff = G[free][:, free]
    rhs = -(G[free][:, fixed] @ fixed_vals)
    ab = np.zeros((bandwidth + 1, free.shape[0]))
    for k in range(bandwidth + 1):
        diag = Gff.diagonal(k)
        ab[bandwidth - k, k:] = diag
    try:
        wf = la.solveh_banded(ab, rhs)
    except la.LinAlgError:
        ab[bandwidth] += _shift(G)
        try:
            wf = la.solveh_banded(ab, rhs)
        except la.LinAlgError as exc:
            raise SingularSystemError(str(exc)) from exc
    return wf


def solve_reduced(problem: BackProjectionProblem) -> np.ndarray:
    """Same minimizer as :func:`solve_kkt`, by variable reduction.

    With ``N`` an orthonormal basis of ``p``'s complement, every feasible
    curve is ``U = p u' + N W'`` and the objective splits into the fixed
    term ``||D u||^2`` plus ``||D w_j||^2`` for each complement coordinate.
    Each ``w_j`` is pinned only at the anchors, which leaves one small
    banded positive-definite solve per coordinate.
    """
    problem.check_consistency()
    p, u, idx = problem.direction, problem.target, problem.anchor_indices
    T = problem.T
    N = orthogonal_complement(p)
    U = np.outer(p, u)
    if N.shape[1] == 0:
        U[:, idx] = problem.anchor_values
        return U
    D = diff_operator(problem.order, T).rows
    G = (D.T @ D).tocsr()
    free = np.setdiff1d(np.arange(T), idx)
    anchors_w = problem.anchor_values.T @ N
    W = np.empty((T, N.shape[1]))
    W[idx] = anchors_w
    if free.size:
        W[free] = _banded_minimizer(G, free, idx, anchors_w, problem.order)
    return U + N @ W.T


def solve_backprojection(problem: BackProjectionProblem, method: str = "kkt") -> np.ndarray:
    """Lifted d-D envelope of shape ``(d, T)``.

    ``method="kkt"`` factorizes the full KKT system; ``method="reduced"``
    uses the equivalent banded variable reduction.
    """
    if method == "kkt":
        qp = assemble(problem)
        return solve_kkt(qp).reshape(problem.d, problem.T)
    if method == "reduced":
        return solve_reduced(problem)
    raise ValueError(f"unknown back-projection method {method!r}")


def lift_envelope(knots: SplineKnots, p, T: int, order: int = 2,
                  method: str = "kkt") -> np.ndarray:
    """Back-project the spline envelope through d-D ``knots`` along ``p``.

    The lifting problem is posed on the integer grid spanning both the
    signal ``[0, T-1]`` and every (possibly reflected) knot, anchored at all
    knots, and the result is cropped back to ``[0, T-1]``.
    """
    pos = np.rint(knots.positions).astype(int)
    lo, hi = min(pos[0], 0), max(pos[-1], T - 1)
    grid = np.arange(lo, hi + 1)
    target = cubic_spline_eval(knots.project(p), grid)
    problem = BackProjectionProblem(p, target, pos - lo, knots.values, order)
    return solve_backprojection(problem, method)[:, -lo:T - lo]


def vemd_envelopes(H, p, ex, order: int = 2, boundary: str = "odd",
                   method: str = "kkt") -> EnvelopePair:
    """Upper and lower d-D envelopes of ``H`` lifted from the projection on ``p``."""
    H = np.atleast_2d(np.asarray(getattr(H, "data", H), dtype=float))
    upper, lower = envelope_knots(H, ex, boundary)
    T = H.shape[1]
    return EnvelopePair(
        lift_envelope(upper, p, T, order, method),
        lift_envelope(lower, p, T, order, method),
    )
