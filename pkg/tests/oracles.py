"""Reference implementations that share no code with the package.

Each one is the slow, obvious version of something the package does fast.
"""
from fractions import Fraction

import numpy as np
import scipy.linalg as la


def radical_inverse_digits(m, b):
    """Reverse the base-b digit string of m behind the radix point."""
    if m == 0:
        return Fraction(0)
    digits = []
    while m:
        digits.append(m % b)
        m //= b
    # digits[0] is the least significant; it becomes the first fractional digit
    return sum(Fraction(c, b ** (j + 1)) for j, c in enumerate(digits))


def extrema_brute_force(s):
    """Plateau-aware extrema by scanning every index and its full run."""
    s = list(s)
    T = len(s)
    maxima, minima = [], []
    for i in range(1, T - 1):
        if s[i - 1] == s[i]:
            continue  # not the first index of its run
        j = i
        while j + 1 < T and s[j + 1] == s[i]:
            j += 1
        if j == T - 1:
            continue  # run touches the right end
        if s[i - 1] < s[i] and s[j + 1] < s[i]:
            maxima.append(i)
        elif s[i - 1] > s[i] and s[j + 1] > s[i]:
            minima.append(i)
    return maxima, minima


def natural_spline_dense(x, y, grid):
    """Textbook natural cubic spline: dense solve for the knot second derivatives."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    n = len(x) - 1
    h = np.diff(x)
    A = np.zeros((n + 1, n + 1))
    r = np.zeros(n + 1)
    A[0, 0] = A[n, n] = 1.0
    for i in range(1, n):
        A[i, i - 1] = h[i - 1]
        A[i, i] = 2 * (h[i - 1] + h[i])
        A[i, i + 1] = h[i]
        r[i] = 6 * ((y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1])
    m2 = np.linalg.solve(A, r)
    out = []
    for t in np.asarray(grid, float):
        k = int(np.clip(np.searchsorted(x, t) - 1, 0, n - 1))
        a, b = x[k], x[k + 1]
        hk = b - a
        val = (m2[k] * (b - t) ** 3 + m2[k + 1] * (t - a) ** 3) / (6 * hk)
        val += (y[k] / hk - m2[k] * hk / 6) * (b - t)
        val += (y[k + 1] / hk - m2[k + 1] * hk / 6) * (t - a)
        out.append(val)
    return np.array(out)


def dense_difference(n, T):
    """n-th forward difference matrix built by differencing the identity."""
    return np.diff(np.eye(T), n=n, axis=0)


def dense_lifting_constraints(p, T, anchors, anchor_values):
    """All T projection rows plus d unit rows per anchor (redundancy kept)."""
    d = len(p)
    rows, rhs = [], []
    for i in range(T):
        row = np.zeros(d * T)
        row[np.arange(d) * T + i] = p
        rows.append(row)
    for k, t in enumerate(anchors):
        for c in range(d):
            row = np.zeros(d * T)
            row[c * T + t] = 1.0
            rows.append(row)
    return np.array(rows)


def nullspace_minimizer(Q, A, b):
    """Minimize x'Qx subject to Ax = b by the null-space method on dense matrices."""
    x0, *_ = la.lstsq(A, b)
    Z = la.null_space(A)
    if Z.shape[1] == 0:
        return x0
    y = la.solve(Z.T @ Q @ Z, -Z.T @ Q @ x0, assume_a="sym")
    return x0 + Z @ y


def lifting_oracle(p, u, anchors, anchor_values, n):
    """Dense reference solution of one lifting problem, shape (d, T)."""
    p = np.asarray(p, float)
    u = np.asarray(u, float)
    d, T = len(p), len(u)
    D = dense_difference(n, T)
    Q = np.kron(np.eye(d), D.T @ D)
    A = dense_lifting_constraints(p, T, anchors, anchor_values)
    b = np.concatenate([u, np.asarray(anchor_values, float).T.ravel()])
    return nullspace_minimizer(Q, A, b).reshape(d, T)
