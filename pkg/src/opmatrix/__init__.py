from typing import Optional
import logging

import numpy as np

from ..bernstein import BernsteinBasis, DegreeError, integer_derivative_row
from .models import BandedMatrix, IntegerBandedMatrix, ShapeError

logger = logging.getLogger(__name__)

__all__ = [
    "BandedMatrix",
    "IntegerBandedMatrix",
    "ShapeError",
    "build_integer_derivative_matrix",
    "build_derivative_matrix",
    "build_interior_pair",
    "band_matvec",
    "to_dense",
    "exact_power",
    "nilpotency_index",
    "neumann_inverse",
    "interior_norm_closed_forms",
]


def build_integer_derivative_matrix(N: int, p: int) -> IntegerBandedMatrix:
    """(b-a)^p D_p with exact integer entries, bandwidths (p, p)."""
    if not 0 <= p <= N:
        raise DegreeError(f"derivative order p={p} must satisfy 0 <= p <= N={N}")
    matrix = IntegerBandedMatrix.zeros(N + 1, N + 1, p, p)
    for i in range(N + 1):
        for j, value in integer_derivative_row(i, N, p).items():
            matrix.ab[p + i - j, j] = value
    return matrix


def build_derivative_matrix(basis: BernsteinBasis, p: int) -> BandedMatrix:
    """D_p with (d^p/dx^p) Φ = D_p Φ for Φ = [B_{0,N}, ..., B_{N,N}]^T."""
    exact = build_integer_derivative_matrix(basis.degree, p)
    return exact.to_float(1.0 / basis.interval.length ** p)


def build_interior_pair(basis: BernsteinBasis) -> tuple[BandedMatrix, BandedMatrix]:
    """D_1 and D_2 without their first and last rows and columns."""
    N = basis.degree
    if N < 2:
        raise DegreeError(f"interior matrices need N >= 2, got N={N}")
    first = build_derivative_matrix(basis, 1).submatrix(1, N)
    second = build_derivative_matrix(basis, 2).submatrix(1, N)
    return first, second


def band_matvec(m: BandedMatrix, v) -> np.ndarray:
    v = np.asarray(v)
    if v.shape != (m.n_cols,):
        raise ShapeError(f"vector of shape {v.shape} does not match {m.n_cols} columns")
    return m.matvec(v)


def to_dense(m: BandedMatrix) -> np.ndarray:
    return m.to_dense()


def _is_zero(dense: np.ndarray) -> bool:
    return all(value == 0 for value in dense.flat)


def exact_power(m: BandedMatrix, k: int) -> np.ndarray:
    dense = m.to_dense()
    result = np.eye(m.n_rows, dtype=int).astype(dense.dtype)
    for _ in range(k):
        result = np.dot(result, dense)
    return result


def nilpotency_index(m: BandedMatrix) -> Optional[int]:
    """Smallest k with m^k = 0, or None if m is not nilpotent."""
    dense = m.to_dense()
    power = dense
    for k in range(1, m.n_rows + 1):
        if _is_zero(power):
            return k
        power = np.dot(power, dense)
    return None


def neumann_inverse(m: BandedMatrix, c) -> np.ndarray:
    """(I - c D)^{-1} = sum_k c^k D^k for nilpotent D, as a dense matrix."""
    dense = m.to_dense()
    term = np.eye(m.n_rows, dtype=int).astype(dense.dtype)
    total = term.copy()
    for _ in range(m.n_rows):
        term = c * np.dot(term, dense)
        if _is_zero(term):
            break
        total = total + term
    return total


def interior_norm_closed_forms(N: int) -> tuple[Optional[int], Optional[int]]:
    """Closed forms of ||D̃_1||_inf and ||D̃_2||_inf on [0, 1] where known."""
    first = 2 * (N - 1) if N >= 4 else None
    if 7 <= N <= 15:
        second = 2 * N**2 + 10 * N - 68
    elif N >= 16:
        second = 4 * N**2 - 28 * N + 40
    else:
        second = None
    return first, second
