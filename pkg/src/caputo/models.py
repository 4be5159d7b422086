from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
import sympy as sp
from pydantic import BaseModel, ConfigDict, Field


class OrderError(ValueError):
    """Raised for a fractional order outside (0, 1)."""


class CaputoSeriesError(ArithmeticError):
    """Raised when a termwise Caputo series fails to converge."""


class UnknownExampleError(ValueError):
    """Raised for an unregistered manufactured-solution name."""


class TimeGrid(BaseModel):
    """Uniform grid t_k = k τ, k = 0..M, with τ = T / M."""
    model_config = ConfigDict(frozen=True)

    M: int = Field(ge=1)
    T: float = Field(default=1.0, gt=0)

    @property
    def tau(self) -> float:
        return self.T / self.M

    def t(self, k: int) -> float:
        return k * self.tau

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.M + 1) * self.tau


@dataclass(frozen=True, eq=False)
class L1Weights:
    """L1 coefficients of the Caputo derivative on a uniform grid.

    b_j = (j+1)^{1-α} - j^{1-α} and a_{k,j} = b_{k-j}; mu = 1/(τ^α Γ(2-α)).
    """
    alpha: float
    tau: float
    mu: float
    table: np.ndarray = field(repr=False)

    def b(self, j):
        j = np.asarray(j)
        if np.all(j < self.table.size):
            return self.table[j]
        return (j + 1.0) ** (1.0 - self.alpha) - j ** (1.0 - self.alpha)

    def a(self, k, j):
        return self.b(np.asarray(k) - np.asarray(j))

    def history_coefficients(self, k: int) -> np.ndarray:
        """Weights of c^k, c^{k-1}, ..., c^0 in the rearranged L1 history.

        (1 - b_1), (b_1 - b_2), ..., (b_{k-1} - b_k), b_k; they sum to one.
        """
        if k == 0:
            return np.ones(1)
        b = self.b(np.arange(k + 1))
        return np.concatenate(([1.0 - b[1]], b[1:k] - b[2:k + 1], [b[k]]))


@dataclass(frozen=True, eq=False)
class ManufacturedSolution:
    """Separable exact solution u(x, t) = X(x) Θ(t) on [0, 1].

    `taylor` lists (or generates) the Taylor coefficients of Θ about t = 0;
    the Caputo derivative of u is X(x) times the termwise series of Θ.
    """
    name: str
    spatial: sp.Expr
    temporal: sp.Expr
    taylor: Sequence[float] | Callable[[int], float]
    kappa1: float
    kappa2: float
    description: str = ""

    x = sp.Symbol("x", real=True)
    t = sp.Symbol("t", real=True, nonnegative=True)

    @cached_property
    def _lambdified(self) -> dict[str, Callable]:
        x = ManufacturedSolution.x
        return {
            "X": sp.lambdify(x, self.spatial, "numpy"),
            "X_x": sp.lambdify(x, sp.diff(self.spatial, x), "numpy"),
            "X_xx": sp.lambdify(x, sp.diff(self.spatial, x, 2), "numpy"),
            "theta": sp.lambdify(ManufacturedSolution.t, self.temporal, "numpy"),
            "theta_t": sp.lambdify(ManufacturedSolution.t, sp.diff(self.temporal, ManufacturedSolution.t), "numpy"),
        }

    def factor_values(self, key: str, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(self._lambdified[key](x), x.shape).astype(float)

    def theta(self, t: float) -> float:
        return float(self._lambdified["theta"](t))

    def theta_t(self, t: float) -> float:
        return float(self._lambdified["theta_t"](t))

    def spatial_factor(self, x) -> np.ndarray:
        return self.factor_values("X", x)

    def exact(self, x, t: float) -> np.ndarray:
        return self.factor_values("X", x) * self.theta(t)

    def u_x(self, x, t: float) -> np.ndarray:
        return self.factor_values("X_x", x) * self.theta(t)

    def u_xx(self, x, t: float) -> np.ndarray:
        return self.factor_values("X_xx", x) * self.theta(t)

    def initial(self, x) -> np.ndarray:
        return self.exact(x, 0.0)
