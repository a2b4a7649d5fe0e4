"""Independent reference computations used only by the tests.

These deliberately avoid the code paths they check: the characteristic
polynomial comes from trace recursion (Faddeev-LeVerrier) and is rooted
through numpy's companion-matrix machinery, determinants are Laplace
expansions, and the assignment distance is a plain recursive search.
"""

from __future__ import annotations

import itertools

import numpy as np


def charpoly_coeffs(A: np.ndarray) -> np.ndarray:
    """Monic characteristic polynomial coefficients, highest degree first."""
    A = np.asarray(A, dtype=np.complex128)
    n = A.shape[0]
    coeffs = np.zeros(n + 1, dtype=np.complex128)
    coeffs[0] = 1.0
    M = np.zeros_like(A)
    for k in range(1, n + 1):
        M = A @ M + coeffs[k - 1] * np.eye(n)
        coeffs[k] = -np.trace(A @ M) / k
    return coeffs


def companion_spectrum(A: np.ndarray) -> np.ndarray:
    """Eigenvalues as roots of the characteristic polynomial (via np.roots)."""
    return np.roots(charpoly_coeffs(A))


def laplace_det(M: np.ndarray) -> complex:
    """Determinant by cofactor expansion (fine for the tiny oracle matrices)."""
    n = M.shape[0]
    if n == 1:
        return complex(M[0, 0])
    if n == 2:
        return complex(M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0])
    total = 0.0 + 0.0j
    rest = M[1:, :]
    for j in range(n):
        cols = [c for c in range(n) if c != j]
        total += ((-1) ** j) * M[0, j] * laplace_det(rest[:, cols])
    return total


def minor_rank(M: np.ndarray, tol: float = 1e-6) -> int:
    """Largest k with a k x k minor of magnitude above tol * scale^k."""
    M = np.asarray(M, dtype=np.complex128)
    m, n = M.shape
    scale = max(float(np.max(np.abs(M))), 1e-300)
    for k in range(min(m, n), 0, -1):
        thresh = tol * scale**k
        for rows in itertools.combinations(range(m), k):
            sub_rows = M[list(rows), :]
            for cols in itertools.combinations(range(n), k):
                if abs(laplace_det(sub_rows[:, list(cols)])) > thresh:
                    return k
    return 0


def minimax_assignment(a: np.ndarray, b: np.ndarray) -> float:
    """Min over pairings of the max |a_i - b_pi(i)|, by explicit recursion."""
    n = len(a)
    best = [np.inf]

    def rec(i: int, used: int, cur: float) -> None:
        if cur >= best[0]:
            return
        if i == n:
            best[0] = cur
            return
        for j in range(n):
            if not used & (1 << j):
                rec(i + 1, used | (1 << j), max(cur, abs(a[i] - b[j])))

    rec(0, 0, 0.0)
    return float(best[0])


def is_rank_one_by_minors(M: np.ndarray, tol: float = 1e-8) -> bool:
    """True when every 2x2 minor vanishes relative to the largest entry."""
    M = np.asarray(M, dtype=np.complex128)
    scale = max(float(np.max(np.abs(M))), 1e-300)
    m, n = M.shape
    for r1, r2 in itertools.combinations(range(m), 2):
        for c1, c2 in itertools.combinations(range(n), 2):
            minor = M[r1, c1] * M[r2, c2] - M[r1, c2] * M[r2, c1]
            if abs(minor) > tol * scale**2:
                return False
    return True
