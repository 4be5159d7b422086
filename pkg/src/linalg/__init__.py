import logging

import numpy as np
from scipy.linalg import hilbert, invhilbert
from scipy.linalg.lapack import get_lapack_funcs

from ..opmatrix import BandedMatrix, ShapeError
from ..settings import Quadrature
from .models import BandedLU, ConvergenceError, QuadratureRule, SingularMatrixError

logger = logging.getLogger(__name__)

__all__ = [
    "BandedLU",
    "ConvergenceError",
    "QuadratureRule",
    "SingularMatrixError",
    "gauss_legendre",
    "banded_lu_factor",
    "banded_lu_solve",
    "inf_condition_number",
    "hilbert_condition_number",
]


def _legendre(n: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """P_n(x) and P_n'(x) from the three-term recurrence."""
    previous, current = np.ones_like(x), x.copy()
    for k in range(2, n + 1):
        previous, current = current, ((2 * k - 1) * x * current - (k - 1) * previous) / k
    derivative = n * (x * current - previous) / (x**2 - 1)
    return current, derivative


def gauss_legendre(
        n: int = Quadrature.POINTS,
        tol: float = Quadrature.NEWTON_TOL,
        max_iter: int = Quadrature.NEWTON_MAX_ITER,
        ) -> QuadratureRule:
    """n-point Gauss-Legendre rule mapped to [0, 1], exact to degree 2n-1.

    Roots of P_n by Newton's method from Chebyshev-like initial guesses.
    """
    if n < 1:
        raise ValueError(f"quadrature needs at least one point, got n={n}")
    x = np.cos(np.pi * (np.arange(1, n + 1) - 0.25) / (n + 0.5))
    for _ in range(max_iter):
        value, derivative = _legendre(n, x)
        step = value / derivative
        x = x - step
        if np.max(np.abs(step)) <= tol:
            break
    else:
        raise ConvergenceError(f"Legendre roots for n={n} did not converge in {max_iter} iterations")
    _, derivative = _legendre(n, x)
    weights = 2.0 / ((1.0 - x**2) * derivative**2)
    # guesses decrease in x; reverse so nodes increase on [0, 1]
    return QuadratureRule(nodes=((1.0 + x) / 2.0)[::-1].copy(), weights=(weights / 2.0)[::-1].copy())


def banded_lu_factor(m: BandedMatrix) -> BandedLU:
    """PA = LU with partial pivoting (LAPACK gbtrf)."""
    if m.n_rows != m.n_cols:
        raise ShapeError(f"LU needs a square matrix, got {m.shape}")
    kl, ku = m.lower_bw, m.upper_bw
    storage = np.zeros((2 * kl + ku + 1, m.n_cols))
    storage[kl:] = m.ab
    gbtrf, = get_lapack_funcs(("gbtrf",), (storage,))
    factors, pivots, info = gbtrf(storage, kl, ku)
    if info > 0:
        raise SingularMatrixError(f"zero pivot at row {info - 1} of a {m.shape} band matrix", pivot=info - 1)
    if info < 0:
        raise ValueError(f"gbtrf rejected argument {-info}")
    logger.debug(f"Factorized {m.shape} band matrix with bandwidths ({kl}, {ku})")
    return BandedLU(factors=factors, pivots=pivots, n=m.n_rows, lower_bw=kl, upper_bw=ku)


def banded_lu_solve(lu: BandedLU, rhs) -> np.ndarray:
    """Solve A x = rhs for one right-hand side or a column block."""
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape[0] != lu.n or rhs.ndim > 2:
        raise ShapeError(f"right-hand side of shape {rhs.shape} does not match n={lu.n}")
    gbtrs, = get_lapack_funcs(("gbtrs",), (lu.factors,))
    block = rhs.reshape(lu.n, -1)
    x, info = gbtrs(lu.factors, lu.lower_bw, lu.upper_bw, block, lu.pivots)
    if info != 0:
        raise ValueError(f"gbtrs rejected argument {-info}")
    return x.reshape(rhs.shape)


def inf_condition_number(m) -> float:
    """||A||_inf ||A^{-1}||_inf, the inverse built from n banded solves."""
    if not isinstance(m, BandedMatrix):
        m = BandedMatrix.from_dense(np.asarray(m, dtype=float))
    lu = banded_lu_factor(m)
    inverse = banded_lu_solve(lu, np.eye(m.n_rows))
    return float(m.inf_norm()) * float(np.abs(inverse).sum(axis=1).max())


def hilbert_condition_number(n: int) -> float:
    """Cond_inf of the order-n Hilbert matrix from its exact integer inverse."""
    inverse_norm = max(sum(abs(v) for v in row) for row in invhilbert(n, exact=True))
    return float(np.abs(hilbert(n)).sum(axis=1).max()) * float(inverse_norm)
