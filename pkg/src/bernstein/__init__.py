from fractions import Fraction
from math import comb, perm
from typing import Dict, Sequence
import logging

import numpy as np

from .models import (
    BernsteinBasis,
    DegreeError,
    DomainError,
    DualCoefficients,
    ExpansionCoefficients,
    Interval,
)

logger = logging.getLogger(__name__)

__all__ = [
    "BernsteinBasis",
    "DegreeError",
    "DomainError",
    "DualCoefficients",
    "ExpansionCoefficients",
    "Interval",
    "eval_basis",
    "eval_all",
    "eval_matrix",
    "degree_elevate",
    "derivative_in_lower_basis",
    "derivative_expansion",
    "derivative_scale",
    "integer_derivative_row",
    "derivative_values",
    "dual_coefficients",
    "dual_coefficients_exact",
    "dual_values",
    "dual_values_exact",
    "gram_matrix_exact",
    "poly_eval",
]


def _check_points(basis: BernsteinBasis, xs) -> np.ndarray:
    xs = np.asarray(xs, dtype=float).ravel()
    interval = basis.interval
    outside = ~((xs >= interval.a) & (xs <= interval.b))
    if np.any(outside):
        raise DomainError(
            f"x={xs[outside][0]} outside [{interval.a}, {interval.b}]"
        )
    return xs


def _check_order(N: int, p: int) -> None:
    if not 0 <= p <= N:
        raise DegreeError(f"derivative order p={p} must satisfy 0 <= p <= N={N}")


def _check_index(i: int, N: int) -> None:
    if not 0 <= i <= N:
        raise DegreeError(f"basis index i={i} outside 0..{N}")


def eval_matrix(basis: BernsteinBasis, xs) -> np.ndarray:
    """Values B_{j,N}(x) at every point, shape (len(xs), N+1).

    Raised one degree at a time with B_{j,n} = (1-s) B_{j,n-1} + s B_{j-1,n-1},
    s = (x-a)/(b-a), which never forms a binomial or a power.
    """
    xs = _check_points(basis, xs)
    s = basis.interval.to_unit(xs)
    t = 1.0 - s
    values = np.zeros((xs.size, basis.size))
    values[:, 0] = 1.0
    for n in range(1, basis.degree + 1):
        values[:, n] = s * values[:, n - 1]
        for j in range(n - 1, 0, -1):
            values[:, j] = t * values[:, j] + s * values[:, j - 1]
        values[:, 0] = t * values[:, 0]
    return values


def eval_all(basis: BernsteinBasis, x: float) -> np.ndarray:
    return eval_matrix(basis, [x])[0]


def eval_basis(i: int, basis: BernsteinBasis, x: float) -> float:
    """B_{i,N}(x); zero for i < 0 or i > N."""
    values = eval_all(basis, x)
    if i < 0 or i > basis.degree:
        return 0.0
    return float(values[i])


def poly_eval(coeffs: Sequence[float], basis: BernsteinBasis, x: float) -> float:
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (basis.size,):
        raise DegreeError(
            f"expected {basis.size} coefficients for degree {basis.degree}, got {coeffs.size}"
        )
    return float(eval_all(basis, x) @ coeffs)


def degree_elevate(i: int, N: int, j: int) -> Dict[int, float]:
    """Coefficients c_r with B_{i,N-j} = sum_r c_r B_{r,N}, r = i..i+j."""
    if not 0 <= j <= N:
        raise DegreeError(f"elevation level j={j} must satisfy 0 <= j <= N={N}")
    if not 0 <= i <= N - j:
        raise DegreeError(f"basis index i={i} outside 0..{N - j}")
    lower = comb(N - j, i)
    return {r: lower * comb(j, r - i) / comb(N, r) for r in range(i, i + j + 1)}


def derivative_scale(p: int, basis: BernsteinBasis) -> float:
    """c_{p,N} = (-1)^p N! / ((b-a)^p (N-p)!)."""
    _check_order(basis.degree, p)
    return (-1) ** p * perm(basis.degree, p) / basis.interval.length ** p


def derivative_in_lower_basis(i: int, basis: BernsteinBasis, p: int) -> ExpansionCoefficients:
    """B_{i,N}^{(p)} = c_{p,N} sum_k (-1)^k C(p,k) B_{i-k,N-p}."""
    N = basis.degree
    _check_order(N, p)
    _check_index(i, N)
    entries = {
        i - k: float((-1) ** k * comb(p, k))
        for k in range(max(0, i + p - N), min(i, p) + 1)
    }
    return ExpansionCoefficients(
        i=i, p=p, degree=N - p, scale=derivative_scale(p, basis), entries=entries
    )


def _omega_numerators(i: int, N: int, p: int) -> Dict[int, int]:
    # C(N, j) * ω_{i,j}, summed over the at most p+1 terms μ_{i,k,j}
    ks = range(max(0, i + p - N), min(i, p) + 1)
    return {
        j: sum(
            (-1) ** k * comb(p, k) * comb(N - p, i - k) * comb(p, j - i + k)
            for k in ks
            if 0 <= j - i + k <= p
        )
        for j in range(max(0, i - p), min(N, i + p) + 1)
    }


def derivative_expansion(i: int, basis: BernsteinBasis, p: int) -> ExpansionCoefficients:
    """B_{i,N}^{(p)} = c_{p,N} sum_j ω_{i,j} B_{j,N} with |i - j| <= p."""
    N = basis.degree
    _check_order(N, p)
    _check_index(i, N)
    entries = {
        j: numerator / comb(N, j)
        for j, numerator in _omega_numerators(i, N, p).items()
    }
    return ExpansionCoefficients(
        i=i, p=p, degree=N, scale=derivative_scale(p, basis), entries=entries
    )


def integer_derivative_row(i: int, N: int, p: int) -> Dict[int, int]:
    """Row i of (b-a)^p D_p as exact integers."""
    _check_order(N, p)
    _check_index(i, N)
    factor = (-1) ** p * perm(N, p)
    row = {}
    for j, numerator in _omega_numerators(i, N, p).items():
        value, remainder = divmod(factor * numerator, comb(N, j))
        if remainder:
            raise ArithmeticError(f"non-integral entry ({i}, {j}) of D_{p} for N={N}")
        row[j] = value
    return row


def derivative_values(coeffs: Sequence[float], basis: BernsteinBasis, xs, p: int = 1) -> np.ndarray:
    """Values of the p-th derivative of sum_i c_i B_{i,N} at xs."""
    N = basis.degree
    _check_order(N, p)
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (basis.size,):
        raise DegreeError(f"expected {basis.size} coefficients, got {coeffs.size}")
    lowered = basis.lowered(p)
    lowered_coeffs = sum(
        (-1) ** k * comb(p, k) * coeffs[k:k + lowered.size] for k in range(p + 1)
    )
    return derivative_scale(p, basis) * (eval_matrix(lowered, xs) @ lowered_coeffs)


def _dual_numerators(N: int) -> list[list[int]]:
    numerators = [[0] * (N + 1) for _ in range(N + 1)]
    for i in range(N + 1):
        for j in range(i, N + 1):
            total = sum(
                (2 * r + 1)
                * comb(N + r + 1, N - i) * comb(N - r, N - i)
                * comb(N + r + 1, N - j) * comb(N - r, N - j)
                for r in range(i + 1)
            )
            numerators[i][j] = numerators[j][i] = (-1) ** (i + j) * total
    return numerators


def dual_coefficients(basis: BernsteinBasis) -> DualCoefficients:
    """Coefficients d_{i,j} of the dual basis, B*_{i,N} = sum_j d_{i,j} B_{j,N}.

    Each entry is an exact integer ratio rounded once, then scaled by 1/(b-a).
    """
    N = basis.degree
    numerators = _dual_numerators(N)
    d = np.empty((N + 1, N + 1))
    for i in range(N + 1):
        for j in range(N + 1):
            d[i, j] = numerators[i][j] / (comb(N, i) * comb(N, j))
    d /= basis.interval.length
    logger.debug(f"Dual coefficients for N={N}: max |d| = {np.abs(d).max():.3e}")
    return DualCoefficients(basis=basis, d=d)


def dual_coefficients_exact(N: int) -> np.ndarray:
    """d_{i,j} on [0, 1] as Fractions."""
    numerators = _dual_numerators(N)
    d = np.empty((N + 1, N + 1), dtype=object)
    for i in range(N + 1):
        for j in range(N + 1):
            d[i, j] = Fraction(numerators[i][j], comb(N, i) * comb(N, j))
    return d


def gram_matrix_exact(N: int) -> np.ndarray:
    """int_0^1 B_{i,N} B_{j,N} dx = C(N,i) C(N,j) / ((2N+1) C(2N, i+j))."""
    gram = np.empty((N + 1, N + 1), dtype=object)
    for i in range(N + 1):
        for j in range(N + 1):
            gram[i, j] = Fraction(comb(N, i) * comb(N, j), (2 * N + 1) * comb(2 * N, i + j))
    return gram


def dual_values(dual: DualCoefficients, xs) -> np.ndarray:
    """B*_{i,N}(x) at every point, shape (len(xs), N+1)."""
    return eval_matrix(dual.basis, xs) @ dual.d.T


def dual_values_exact(N: int, ss) -> np.ndarray:
    """B*_{i,N}(s) on [0, 1], shape (len(ss), N+1), correctly rounded.

    Every float s is an exact ratio n/m, so
    B*_{i,N}(s) = sum_j num_{i,j} n^j (m-n)^{N-j} / (C(N,i) m^N)
    is summed in Python integers and divided once. The float route
    d @ B(s) cancels terms of size max|d| and loses about log10(max|d|) digits.
    """
    ss = _check_points(BernsteinBasis(degree=N), ss)
    numerators = _dual_numerators(N)
    values = np.empty((ss.size, N + 1))
    for q, s in enumerate(ss):
        n, m = float(s).as_integer_ratio()
        powers = [n**j * (m - n) ** (N - j) for j in range(N + 1)]
        for i in range(N + 1):
            total = sum(numerators[i][j] * powers[j] for j in range(N + 1))
            values[q, i] = float(Fraction(total, comb(N, i) * m**N))
    return values
