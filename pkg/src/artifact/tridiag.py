"""Tridiagonal solvers.

``thomas`` is the textbook elimination, kept as a reference and for small
systems. ``TridiagonalLU`` factors once with LAPACK (?gttrf) and reuses the
factors; the time steppers solve the same matrix hundreds of thousands of times.
"""

import numpy as np
from scipy.linalg import lapack


def thomas(lower, diag, upper, rhs):
    """Solve a tridiagonal system by forward elimination and back substitution.

    ``lower`` and ``upper`` have length n-1 (sub- and super-diagonal), ``diag``
    and ``rhs`` length n. No pivoting; intended for diagonally dominant matrices.
    """
    a = np.asarray(lower, dtype=float)
    b = np.asarray(diag, dtype=float)
    c = np.asarray(upper, dtype=float)
    d = np.asarray(rhs, dtype=float)
    n = b.size
    cp = np.empty(max(n - 1, 0))
    dp = np.empty(n)
    denom = b[0]
    if n > 1:
        cp[0] = c[0] / denom
    dp[0] = d[0] / denom
    for i in range(1, n):
        denom = b[i] - a[i - 1] * cp[i - 1]
        if i < n - 1:
            cp[i] = c[i] / denom
        dp[i] = (d[i] - a[i - 1] * dp[i - 1]) / denom
    x = np.empty(n)
    x[-1] = dp[-1]
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return x


class TridiagonalLU:
    """LU factors of a fixed tridiagonal matrix."""

    def __init__(self, lower, diag, upper):
        self.n = len(diag)
        dl, d, du, du2, ipiv, info = lapack.dgttrf(
            np.array(lower, dtype=float), np.array(diag, dtype=float), np.array(upper, dtype=float)
        )
        if info != 0:
            raise np.linalg.LinAlgError(f"tridiagonal matrix is singular (info={info})")
        self._factors = (dl, d, du, du2, ipiv)

    def solve(self, rhs):
        x, info = lapack.dgttrs(*self._factors, np.asarray(rhs, dtype=float))
        if info != 0:
            raise np.linalg.LinAlgError(f"dgttrs failed (info={info})")
        return x


def solve_tridiagonal(lower, diag, upper, rhs):
    """One-shot solve for a matrix that changes every call."""
    _, _, _, x, info = lapack.dgtsv(
        np.array(lower, dtype=float), np.array(diag, dtype=float),
        np.array(upper, dtype=float), np.array(rhs, dtype=float),
    )
    if info != 0:
        raise np.linalg.LinAlgError(f"dgtsv failed (info={info})")
    return x


def apply_tridiagonal(lower, diag, upper, v):
    """Matrix-vector product with a tridiagonal matrix."""
    out = np.asarray(diag) * v
    out[:-1] += np.asarray(upper) * v[1:]
    out[1:] += np.asarray(lower) * v[:-1]
    return out
