"""Unbiasedness residuals linking CHMs to mutually unbiased bases.

Two orthonormal bases (given as the columns of unitary matrices) are
mutually unbiased when every cross inner product has modulus 1/sqrt(d).
A unitary U is unbiased against the identity exactly when sqrt(d) * U is
a CHM, which is the bridge this module measures.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .core import DimensionError, as_matrix, matrix_from_json, matrix_to_json


def _require_unitary(M: np.ndarray, label: str, tol: float) -> None:
    n = M.shape[0]
    dev = float(np.linalg.norm(M.conj().T @ M - np.eye(n)))
    if dev > tol:
        raise ValueError(f"{label} is not unitary within {tol:g} (deviation {dev:.3e})")


@dataclass(frozen=True)
class BasisSet:
    """A list of orthonormal bases, each given as a unitary matrix of columns."""

    bases: tuple
    d: int

    def __post_init__(self):
        mats = tuple(as_matrix(B) for B in self.bases)
        if not mats:
            raise ValueError("basis set must be non-empty")
        for k, B in enumerate(mats):
            if B.shape[0] != self.d:
                raise DimensionError(f"basis {k} has dimension {B.shape[0]}, expected {self.d}")
            _require_unitary(B, f"basis {k}", 1e-10)
        object.__setattr__(self, "bases", mats)

    @classmethod
    def from_matrices(cls, mats) -> "BasisSet":
        mats = [as_matrix(B) for B in mats]
        return cls(bases=tuple(mats), d=mats[0].shape[0])

    def to_json(self) -> str:
        return "[" + ", ".join(matrix_to_json(B) for B in self.bases) + "]"

    @classmethod
    def from_json(cls, text: str) -> "BasisSet":
        items = json.loads(text)
        if not isinstance(items, list) or not items:
            raise ValueError("basis-set JSON must be a non-empty list of matrix objects")
        mats = [matrix_from_json(json.dumps(item)) for item in items]
        return cls.from_matrices(mats)


def unbiasedness_residual(A, B, tol: float = 1e-10) -> float:
    """Max over (m, n) of | |<a_m, b_n>| - 1/sqrt(d) | for unitary A, B."""
    A = as_matrix(A)
    B = as_matrix(B)
    if A.shape != B.shape:
        raise DimensionError(f"shape mismatch: {A.shape} vs {B.shape}")
    _require_unitary(A, "first basis", tol)
    _require_unitary(B, "second basis", tol)
    d = A.shape[0]
    cross = np.abs(A.conj().T @ B)
    return float(np.max(np.abs(cross - 1.0 / math.sqrt(d))))


@dataclass(frozen=True)
class TrioReport:
    """Pairwise unbiasedness residuals among {I, H1/sqrt6, H2/sqrt6, H3/sqrt6}."""

    residuals: dict
    max_residual: float
    worst_pair: tuple

    def to_dict(self) -> dict:
        return {
            "residuals": {"|".join(k): v for k, v in self.residuals.items()},
            "max_residual": self.max_residual,
            "worst_pair": list(self.worst_pair),
        }


def trio_check(H1, H2, H3, tol: float = 1e-8) -> TrioReport:
    """Check whether three CHMs form an MUB trio together with the identity."""
    mats = [as_matrix(H) for H in (H1, H2, H3)]
    d = mats[0].shape[0]
    for k, M in enumerate(mats):
        if M.shape[0] != d:
            raise DimensionError("all three matrices must share one dimension")
        _require_unitary(M / math.sqrt(d), f"H{k + 1}/sqrt(d)", tol)

    bases = [("I", np.eye(d, dtype=np.complex128))]
    bases += [(f"H{k + 1}", M / math.sqrt(d)) for k, M in enumerate(mats)]
    residuals = {}
    worst_pair, worst = None, -1.0
    for i in range(len(bases)):
        for j in range(i + 1, len(bases)):
            (na, Ua), (nb, Ub) = bases[i], bases[j]
            r = unbiasedness_residual(Ua, Ub, tol)
            residuals[(na, nb)] = r
            if r > worst:
                worst, worst_pair = r, (na, nb)
    return TrioReport(residuals=residuals, max_residual=worst, worst_pair=worst_pair)
