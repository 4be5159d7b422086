from math import isfinite
from typing import Callable, Sequence
import logging

import numpy as np
import sympy as sp
from scipy.integrate import quad
from scipy.special import gamma, gammaln

from ..settings import CaputoSeries
from .models import (
    CaputoSeriesError,
    L1Weights,
    ManufacturedSolution,
    OrderError,
    TimeGrid,
    UnknownExampleError,
)
from .examples import BuiltinExamples, builtin_examples, get_example

logger = logging.getLogger(__name__)

__all__ = [
    "CaputoSeriesError",
    "L1Weights",
    "ManufacturedSolution",
    "OrderError",
    "TimeGrid",
    "UnknownExampleError",
    "BuiltinExamples",
    "check_order",
    "l1_mu",
    "l1_weights",
    "caputo_power",
    "caputo_series",
    "caputo_quadrature",
    "caputo_time_factor",
    "manufactured_source",
    "assembled_source",
    "manufactured_residual",
    "builtin_examples",
    "get_example",
]


def check_order(alpha: float) -> float:
    if not 0.0 < alpha < 1.0:
        raise OrderError(f"fractional order must lie in (0, 1), got alpha={alpha}")
    return alpha


def l1_mu(alpha: float, tau: float) -> float:
    """μ = 1 / (τ^α Γ(2-α))."""
    check_order(alpha)
    return float(1.0 / (tau**alpha * gamma(2.0 - alpha)))


def l1_weights(alpha: float, grid: TimeGrid) -> L1Weights:
    check_order(alpha)
    j = np.arange(grid.M + 1, dtype=float)
    table = (j + 1.0) ** (1.0 - alpha) - j ** (1.0 - alpha)
    return L1Weights(alpha=alpha, tau=grid.tau, mu=l1_mu(alpha, grid.tau), table=table)


def _power_factor(m: int, alpha: float) -> float:
    # Γ(m+1) / Γ(m+1-α)
    return float(np.exp(gammaln(m + 1) - gammaln(m + 1 - alpha)))


def caputo_power(m: int, alpha: float, t: float) -> float:
    """D_t^α t^m = Γ(m+1)/Γ(m+1-α) t^{m-α}; zero for m = 0."""
    if m == 0:
        return 0.0
    return _power_factor(m, alpha) * t ** (m - alpha)


def caputo_series(
        series: Sequence[float] | Callable[[int], float],
        alpha: float,
        t: float,
        tol: float = CaputoSeries.TOL,
        max_terms: int = CaputoSeries.MAX_TERMS,
        ) -> float:
    """Termwise Caputo derivative of sum_m series[m] t^m.

    A finite sequence is summed completely. A callable coefficient
    generator is summed until a term with nonzero coefficient falls
    below `tol` in magnitude.
    """
    if callable(series):
        coefficient, limit = series, max_terms
    else:
        coefficient, limit = series.__getitem__, len(series) - 1
    total = 0.0
    for m in range(1, limit + 1):
        c = coefficient(m)
        if c == 0:
            continue
        term = c * caputo_power(m, alpha, t)
        total += term
        if callable(series) and abs(term) < tol:
            return total
    if callable(series):
        raise CaputoSeriesError(f"Caputo series at t={t} not below {tol} after {max_terms} terms")
    return total


def caputo_quadrature(derivative: Callable[[float], float], alpha: float, t: float) -> float:
    """(1/Γ(1-α)) ∫_0^t f'(s) (t-s)^{-α} ds with the algebraic weight of QUADPACK."""
    if t == 0:
        return 0.0
    value, _ = quad(derivative, 0.0, t, weight="alg", wvar=(0.0, -alpha), epsabs=1e-13, epsrel=1e-12)
    return value / gamma(1.0 - alpha)


def caputo_time_factor(solution: ManufacturedSolution, alpha: float, t: float) -> float:
    return caputo_series(solution.taylor, alpha, t)


def manufactured_source(
        solution: ManufacturedSolution,
        alpha: float,
        kappa1: float,
        kappa2: float,
        ) -> Callable[[np.ndarray, float], np.ndarray]:
    """S = D_t^α u - κ₁ u_xx + κ₂ u_x for the separable exact solution."""
    check_order(alpha)

    def source(x, t: float) -> np.ndarray:
        caputo = caputo_time_factor(solution, alpha, t)
        if not isfinite(caputo):
            raise CaputoSeriesError(f"non-finite Caputo factor for {solution.name} at t={t}")
        return (
            solution.spatial_factor(x) * caputo
            - kappa1 * solution.u_xx(x, t)
            + kappa2 * solution.u_x(x, t)
        )

    return source


def manufactured_residual(
        solution: ManufacturedSolution,
        alpha: float,
        kappa1: float,
        kappa2: float,
        x,
        t: float,
        method: str = "series",
        ) -> np.ndarray:
    """D_t^α u - κ₁ u_xx + κ₂ u_x - S, pointwise in x.

    method="quadrature" evaluates D_t^α u by weakly singular quadrature of
    Θ' instead of the termwise series used to build S.
    """
    if method == "quadrature":
        caputo = caputo_quadrature(solution.theta_t, alpha, t)
    elif method == "series":
        caputo = caputo_time_factor(solution, alpha, t)
    else:
        raise ValueError(f"unknown Caputo method {method!r}")
    caputo_u = solution.spatial_factor(x) * caputo
    source = manufactured_source(solution, alpha, kappa1, kappa2)
    return caputo_u - kappa1 * solution.u_xx(x, t) + kappa2 * solution.u_x(x, t) - source(x, t)



def assembled_source(
        solution: ManufacturedSolution,
        alpha: float,
        kappa1: float,
        kappa2: float,
        ) -> Callable[[float, float], float]:
    """S(x, t) built from the full u = X Θ in sympy, scalar x and t.

    Shares nothing with manufactured_source: the x-derivatives act on u itself
    and D_t^α u is weakly singular quadrature of ∂u/∂t at fixed x.
    """
    check_order(alpha)
    x, t = ManufacturedSolution.x, ManufacturedSolution.t
    u = solution.spatial * solution.temporal
    transport = sp.lambdify((x, t), -kappa1 * sp.diff(u, x, 2) + kappa2 * sp.diff(u, x), "math")
    u_t = sp.lambdify((x, t), sp.diff(u, t), "math")

    def source(x_value: float, t_value: float) -> float:
        caputo = caputo_quadrature(lambda s: u_t(x_value, s), alpha, t_value)
        return caputo + float(transport(x_value, t_value))

    return source
