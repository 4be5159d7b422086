from dataclasses import dataclass

import numpy as np

from ..bernstein import Interval


class SingularMatrixError(ArithmeticError):
    """Raised when LU factorization meets an exactly zero pivot."""

    def __init__(self, message: str, pivot: int):
        super().__init__(message)
        self.pivot = pivot


class ConvergenceError(ArithmeticError):
    """Raised when a Newton iteration does not settle."""


@dataclass(frozen=True, eq=False)
class BandedLU:
    """Partial-pivoting LU factors in LAPACK band storage.

    `factors` has 2*lower_bw + upper_bw + 1 rows; U occupies the top
    lower_bw + upper_bw + 1 of them (fill-in from pivoting included).
    """
    factors: np.ndarray
    pivots: np.ndarray
    n: int
    lower_bw: int
    upper_bw: int

    @property
    def u_bandwidth(self) -> int:
        return self.lower_bw + self.upper_bw


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Gauss-Legendre rule on [0, 1]."""
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def size(self) -> int:
        return self.nodes.size

    def mapped(self, interval: Interval) -> tuple[np.ndarray, np.ndarray]:
        return interval.from_unit(self.nodes), self.weights * interval.length

    def integrate(self, f, interval: Interval = Interval()) -> float:
        nodes, weights = self.mapped(interval)
        return float(weights @ np.broadcast_to(np.asarray(f(nodes), dtype=float), nodes.shape))
