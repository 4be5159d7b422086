import asyncio
import logging
import time
from typing import Callable, Iterable, List, Optional, Sequence

import numpy as np
from scipy.special import gamma

from ..bernstein import BernsteinBasis
from ..caputo import TimeGrid, get_example, l1_mu
from ..linalg import SingularMatrixError, gauss_legendre, hilbert_condition_number, inf_condition_number
from ..settings import ErrorGrid, Quadrature
from ..solver import ProblemSpec, SolutionHistory, operator_matrix, solve
from .models import (
    ConditionRow,
    ErrorReport,
    Metric,
    PropertyResult,
    RateRow,
    RateTable,
    VerificationReport,
    convergence_rates,
)

logger = logging.getLogger(__name__)

__all__ = [
    "ConditionRow",
    "ErrorReport",
    "PropertyResult",
    "RateRow",
    "RateTable",
    "VerificationReport",
    "convergence_rates",
    "energy_weight",
    "weighted_norm",
    "energy_norm",
    "error_norms",
    "run_case",
    "temporal_sweep",
    "spatial_sweep",
    "conditioning_study",
    "reproduce",
    "PRESETS",
]


def _sample(f: Callable, xs: np.ndarray, *args) -> np.ndarray:
    return np.broadcast_to(np.asarray(f(xs, *args), dtype=float), xs.shape)


def energy_weight(problem: ProblemSpec, xs: np.ndarray) -> np.ndarray:
    """w(x) = exp(-κ₂ (x - a) / κ₁)."""
    return np.exp(-problem.kappa2 * (xs - problem.domain.a) / problem.kappa1)


def _energy(history: SolutionHistory, values: np.ndarray, slopes: Optional[np.ndarray], nodes, weights) -> float:
    problem, grid = history.problem, history.grid
    w = energy_weight(problem, nodes)
    total = weights @ (w * values**2)
    if slopes is not None:
        alpha1 = problem.kappa1 * grid.tau**problem.alpha * gamma(2.0 - problem.alpha)
        total += alpha1 * (weights @ (w * slopes**2))
    return float(np.sqrt(total))


def _quadrature(history: SolutionHistory):
    return gauss_legendre(Quadrature.POINTS).mapped(history.basis.interval)


def weighted_norm(history: SolutionHistory, k: int) -> float:
    """||u_N^k||_w."""
    nodes, weights = _quadrature(history)
    return _energy(history, history.values(nodes, k), None, nodes, weights)


def energy_norm(history: SolutionHistory, k: int) -> float:
    """||u_N^k||_{1,w} with α₁ = κ₁ τ^α Γ(2-α) in front of the slope term."""
    nodes, weights = _quadrature(history)
    return _energy(history, history.values(nodes, k), history.derivatives(nodes, k), nodes, weights)


def error_norms(
        exact: Callable,
        history: SolutionHistory,
        at: Optional[int] = None,
        exact_dx: Optional[Callable] = None,
        runtime: float = 0.0,
        ) -> ErrorReport:
    """Discrete L_inf over x_j = j/𝒩, j = 0..𝒩, discrete L_2 over j < 𝒩, weighted energy error."""
    k = history.grid.M if at is None else history.check_level(at)
    t = history.grid.t(k)
    problem = history.problem
    exact_dx = exact_dx or problem.exact_dx
    if exact_dx is None:
        raise ValueError("the weighted energy error needs the x-derivative of the exact solution")

    points = ErrorGrid.POINTS
    xs = history.basis.interval.from_unit(np.arange(points + 1) / points)
    errors = _sample(exact, xs, t) - history.values(xs, k)
    squares = errors[:points] ** 2

    nodes, weights = _quadrature(history)
    values = _sample(exact, nodes, t) - history.values(nodes, k)
    slopes = _sample(exact_dx, nodes, t) - history.derivatives(nodes, k)

    return ErrorReport(
        problem=problem.name,
        N=history.basis.degree,
        M=history.grid.M,
        T=history.grid.T,
        alpha=problem.alpha,
        kappa1=problem.kappa1,
        kappa2=problem.kappa2,
        l_inf=float(np.max(np.abs(errors))),
        l_2=float(np.sqrt(squares.mean())),
        l_2_table=float(np.sqrt(squares.sum() / np.sqrt(points))),
        h1w=_energy(history, values, slopes, nodes, weights),
        runtime=runtime,
    )


def run_case(spec: ProblemSpec, N: int, M: int) -> ErrorReport:
    """Solve to T and measure the final-time errors against spec.exact."""
    if spec.exact is None:
        raise ValueError(f"problem {spec.name!r} has no exact solution to compare against")
    started = time.perf_counter()
    history = solve(spec, N, TimeGrid(M=M, T=spec.T))
    runtime = time.perf_counter() - started
    return error_norms(spec.exact, history, exact_dx=spec.exact_dx, runtime=runtime)


def _check_increasing(values: Sequence[int], label: str) -> List[int]:
    values = list(values)
    if any(later <= earlier for earlier, later in zip(values, values[1:])):
        raise ValueError(f"{label} must be strictly increasing, got {values}")
    return values


async def temporal_sweep(spec: ProblemSpec, N: int, M_list: Iterable[int], metric: Metric = "l_inf") -> RateTable:
    """Fixed N, refining τ = T/M; observed orders should approach 2 - α."""
    M_list = _check_increasing(M_list, "M_list")
    logger.info(f"Temporal sweep {spec.name}: alpha={spec.alpha}, N={N}, M={M_list}")
    reports = await asyncio.gather(*(asyncio.to_thread(run_case, spec, N, M) for M in M_list))
    return RateTable.from_reports("time", list(reports), metric)


async def spatial_sweep(spec: ProblemSpec, M: int, N_list: Iterable[int], metric: Metric = "h1w") -> RateTable:
    """Fixed τ, raising the degree N."""
    N_list = _check_increasing(N_list, "N_list")
    logger.info(f"Spatial sweep {spec.name}: alpha={spec.alpha}, M={M}, N={N_list}")
    reports = await asyncio.gather(*(asyncio.to_thread(run_case, spec, N, M) for N in N_list))
    return RateTable.from_reports("space", list(reports), metric)


def conditioning_study(
        alpha: float,
        tau: float,
        kappa_pairs: Iterable[tuple[float, float]],
        N_list: Iterable[int],
        ) -> List[ConditionRow]:
    """C_∞ of μI - κ₁D̃₂ + κ₂D̃₁ and its ratio R_∞ to C_∞ of the order-N Hilbert matrix."""
    mu = l1_mu(alpha, tau)
    rows = []
    for kappa1, kappa2 in kappa_pairs:
        for N in N_list:
            hilbert = hilbert_condition_number(N)
            common = dict(N=N, alpha=alpha, tau=tau, kappa1=kappa1, kappa2=kappa2, hilbert_cond=hilbert)
            try:
                cond = inf_condition_number(operator_matrix(BernsteinBasis(degree=N), kappa1, kappa2, mu))
            except SingularMatrixError:
                logger.warning(f"Singular operator for N={N}, kappa=({kappa1}, {kappa2})")
                rows.append(ConditionRow(status="singular", **common))
                continue
            rows.append(ConditionRow(cond=cond, ratio=cond / hilbert, **common))
    return rows


# -------------------------------------------------------------------------
# Reference parameter sets
# -------------------------------------------------------------------------

TABLE2_RUNS = [(10, 4), (20, 6), (40, 8), (80, 10), (120, 12), (160, 14)]
TABLE3_RUNS = [(40, 4), (80, 6), (160, 8), (320, 10)]
TABLE4_STEPS = [25, 50, 100, 200, 400]
ORDERS = (0.25, 0.5, 0.75)


async def _error_table(problem: str, runs: List[tuple[int, int]]) -> List[ErrorReport]:
    solution = get_example(problem)
    jobs = [
        asyncio.to_thread(run_case, ProblemSpec.from_manufactured(solution, alpha), N, M)
        for alpha in ORDERS
        for M, N in runs
    ]
    return list(await asyncio.gather(*jobs))


async def _table1() -> dict:
    return {"table1": conditioning_study(0.5, 1 / 40, [(0.1, 2.0), (1.0, 1.0)], range(4, 12))}


async def _table2() -> dict:
    return {"table2": await _error_table("ex1", TABLE2_RUNS)}


async def _table3() -> dict:
    return {"table3": await _error_table("ex3", TABLE3_RUNS)}


async def _table4() -> dict:
    solution = get_example("ex4")
    return {
        f"table4_alpha{alpha}": await temporal_sweep(ProblemSpec.from_manufactured(solution, alpha), 14, TABLE4_STEPS)
        for alpha in ORDERS
    }


async def _fig1() -> dict:
    solution = get_example("ex2")
    tables = {}
    for kappa1, kappa2 in [(1.0, 1.0), (0.1, 2.0), (1.0, 0.1)]:
        spec = ProblemSpec.from_manufactured(solution, 0.5, kappa1=kappa1, kappa2=kappa2)
        tables[f"fig1_k{kappa1}_{kappa2}"] = await spatial_sweep(spec, 400, range(4, 15))
    return tables


async def _fig2() -> dict:
    spec = ProblemSpec.from_manufactured(get_example("ex4"), 0.5)
    return {"fig2": await spatial_sweep(spec, 100, range(4, 15))}


PRESETS = {
    "table1": _table1,
    "table2": _table2,
    "table3": _table3,
    "table4": _table4,
    "fig1": _fig1,
    "fig2": _fig2,
}


async def reproduce(name: str) -> dict:
    """Run a reference parameter set; maps table names to rows or RateTables."""
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose one of {', '.join(PRESETS)}")
    logger.info(f"Reproducing {name}")
    return await PRESETS[name]()
