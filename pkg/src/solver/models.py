from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..bernstein import BernsteinBasis, DualCoefficients, Interval, derivative_values, eval_matrix
from ..caputo import L1Weights, ManufacturedSolution, TimeGrid, manufactured_source
from ..linalg import BandedLU, QuadratureRule
from ..opmatrix import BandedMatrix


class BoundaryConditionError(ValueError):
    """Raised when the initial datum does not vanish at both endpoints."""


class AssemblyError(ArithmeticError):
    """Raised when the time-step matrix cannot be factorized."""


class StepIndexError(ValueError):
    """Raised for a time level outside 0..M."""


def _zero(x, *_):
    return np.zeros_like(np.asarray(x, dtype=float))


class ProblemSpec(BaseModel):
    """D_t^α u = κ₁ u_xx - κ₂ u_x + S on (a, b), u(a,t) = u(b,t) = 0, u(x,0) = g."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kappa1: float = Field(gt=0)
    kappa2: float = Field(gt=0)
    alpha: float = Field(gt=0, lt=1)
    domain: Interval = Interval()
    T: float = Field(default=1.0, gt=0)
    initial: Callable[..., Any] = _zero
    source: Callable[..., Any] = _zero
    exact: Optional[Callable[..., Any]] = None
    exact_dx: Optional[Callable[..., Any]] = None
    name: str = "custom"

    @classmethod
    def from_manufactured(
            cls,
            solution: ManufacturedSolution,
            alpha: float,
            T: float = 1.0,
            kappa1: Optional[float] = None,
            kappa2: Optional[float] = None,
            ) -> "ProblemSpec":
        kappa1 = solution.kappa1 if kappa1 is None else kappa1
        kappa2 = solution.kappa2 if kappa2 is None else kappa2
        return cls(
            kappa1=kappa1,
            kappa2=kappa2,
            alpha=alpha,
            T=T,
            initial=solution.initial,
            source=manufactured_source(solution, alpha, kappa1, kappa2),
            exact=solution.exact,
            exact_dx=solution.u_x,
            name=solution.name,
        )


@dataclass(frozen=True, eq=False)
class AssembledSystem:
    """Everything a time step needs, built once per (problem, N, τ).

    A = μI - κ₁D̃₂ᵀ + κ₂D̃₁ᵀ is factorized here; `pairing` maps source values
    at the quadrature nodes to the moments (S, ψ_i), i = 1..N-1.
    """
    problem: ProblemSpec
    basis: BernsteinBasis
    grid: TimeGrid
    weights: L1Weights
    A: BandedMatrix
    lu: BandedLU
    dual: DualCoefficients
    quadrature: QuadratureRule
    nodes: np.ndarray
    pairing: np.ndarray
    satisfies_condition: bool

    @property
    def mu(self) -> float:
        return self.weights.mu

    @property
    def size(self) -> int:
        return self.basis.degree - 1


@dataclass(eq=False)
class SolutionHistory:
    """Interior coefficients c^0..c^M of u_N^k = sum_{i=1}^{N-1} c_i^k B_{i,N}."""
    problem: ProblemSpec
    basis: BernsteinBasis
    grid: TimeGrid
    coeffs: List[np.ndarray] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.coeffs)

    @property
    def is_complete(self) -> bool:
        return len(self.coeffs) == self.grid.M + 1

    def check_level(self, k: int) -> int:
        if not 0 <= k < len(self.coeffs):
            raise StepIndexError(f"time level k={k} outside 0..{len(self.coeffs) - 1}")
        return k

    def as_array(self) -> np.ndarray:
        return np.vstack(self.coeffs)

    def full_coefficients(self, k: int) -> np.ndarray:
        """c^k padded with the zero boundary coefficients."""
        return np.concatenate(([0.0], self.coeffs[self.check_level(k)], [0.0]))

    def values(self, xs, k: int) -> np.ndarray:
        return eval_matrix(self.basis, xs) @ self.full_coefficients(k)

    def derivatives(self, xs, k: int) -> np.ndarray:
        return derivative_values(self.full_coefficients(k), self.basis, xs, p=1)

    def to_csv(self, path: Path) -> Path:
        data = np.column_stack((np.arange(len(self.coeffs)), self.grid.times[:len(self.coeffs)], self.as_array()))
        header = ",".join(["k", "t_k"] + [f"c_{i}" for i in range(1, self.basis.degree)])
        fmt = ["%d"] + ["%.6e"] * (data.shape[1] - 1)
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        np.savetxt(path, data, fmt=fmt, delimiter=",", header=header, comments="")
        return path
