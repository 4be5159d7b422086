"""Petrov-Galerkin solver for the time-fractional advection-dispersion equation.

Trial functions are the interior Bernstein polynomials B_{1,N}..B_{N-1,N},
test functions their duals ψ_i = B*_{i,N}. The L1 scheme turns every time
level into the same banded system A c^{k+1} = b^{k+1}, factorized once.
"""
import logging
import time

import numpy as np

from ..bernstein import BernsteinBasis, dual_coefficients, dual_values_exact, eval_all, eval_matrix
from ..caputo import L1Weights, TimeGrid, l1_weights
from ..linalg import SingularMatrixError, banded_lu_factor, banded_lu_solve, gauss_legendre
from ..opmatrix import BandedMatrix, build_interior_pair
from ..settings import Quadrature, Tolerances
from .models import (
    AssembledSystem,
    AssemblyError,
    BoundaryConditionError,
    ProblemSpec,
    SolutionHistory,
    StepIndexError,
)

logger = logging.getLogger(__name__)

__all__ = [
    "AssembledSystem",
    "AssemblyError",
    "BoundaryConditionError",
    "ProblemSpec",
    "SolutionHistory",
    "StepIndexError",
    "operator_matrix",
    "stability_margin",
    "assemble",
    "project_initial",
    "step",
    "march",
    "solve",
    "evaluate",
    "boundary_moments",
    "determinant_sign",
]


def _sample(f, xs: np.ndarray, *args) -> np.ndarray:
    return np.broadcast_to(np.asarray(f(xs, *args), dtype=float), xs.shape)


def operator_matrix(basis: BernsteinBasis, kappa1: float, kappa2: float, mu: float) -> BandedMatrix:
    """μI - κ₁D̃₂ + κ₂D̃₁; the time-step matrix A is its transpose."""
    first, second = build_interior_pair(basis)
    identity = BandedMatrix.identity(basis.degree - 1)
    return BandedMatrix.combine([(mu, identity), (-kappa1, second), (kappa2, first)])


def stability_margin(basis: BernsteinBasis, kappa1: float, kappa2: float, mu: float) -> float:
    """μ - (κ₁||D̃₂||_∞ + κ₂||D̃₁||_∞); a positive margin guarantees det A != 0."""
    first, second = build_interior_pair(basis)
    return mu - (kappa1 * float(second.inf_norm()) + kappa2 * float(first.inf_norm()))


def assemble(spec: ProblemSpec, N: int, grid: TimeGrid) -> AssembledSystem:
    basis = BernsteinBasis(degree=N, interval=spec.domain)
    weights = l1_weights(spec.alpha, grid)
    A = operator_matrix(basis, spec.kappa1, spec.kappa2, weights.mu).transpose()

    margin = stability_margin(basis, spec.kappa1, spec.kappa2, weights.mu)
    if margin <= 0:
        logger.warning(
            f"N={N}, tau={grid.tau:g}: kappa1*||D2||_inf + kappa2*||D1||_inf exceeds "
            f"mu={weights.mu:.4g} by {-margin:.4g}; nonsingularity of A is not guaranteed"
        )
    try:
        lu = banded_lu_factor(A)
    except SingularMatrixError as e:
        raise AssemblyError(
            f"time-step matrix for N={N}, tau={grid.tau:g} is singular at pivot {e.pivot}; "
            f"kappa1*||D2||_inf + kappa2*||D1||_inf < mu={weights.mu:.4g} is sufficient to avoid this"
        ) from e

    dual = dual_coefficients(basis)
    rule = gauss_legendre(Quadrature.POINTS)
    nodes, _ = rule.mapped(spec.domain)
    # (f, ψ_i) = sum_q w_q ψ_i(s_q) f(x_q) with w, s on [0, 1]; ψ_i scales as 1/(b-a)
    pairing = (dual_values_exact(N, rule.nodes)[:, 1:N] * rule.weights[:, None]).T

    logger.debug(
        f"Assembled {spec.name}: N={N}, tau={grid.tau:g}, mu={weights.mu:.6g}, margin={margin:.4g}"
    )
    return AssembledSystem(
        problem=spec,
        basis=basis,
        grid=grid,
        weights=weights,
        A=A,
        lu=lu,
        dual=dual,
        quadrature=rule,
        nodes=nodes,
        pairing=pairing,
        satisfies_condition=margin > 0,
    )


def project_initial(g, system: AssembledSystem) -> np.ndarray:
    """c^0_i = (g, ψ_i) by Gauss-Legendre quadrature."""
    interval = system.basis.interval
    ends = _sample(g, np.array([interval.a, interval.b]))
    if np.max(np.abs(ends)) > Tolerances.BOUNDARY:
        raise BoundaryConditionError(
            f"initial datum must vanish at both endpoints, got g(a)={ends[0]:.3e}, g(b)={ends[1]:.3e}"
        )
    return system.pairing @ _sample(g, system.nodes)


def step(
        system: AssembledSystem,
        history: SolutionHistory,
        k: int,
        weights: L1Weights | None = None,
        ) -> np.ndarray:
    """c^{k+1} from A c^{k+1} = μ(c^k - sum_{j<k} a_{k,j}(c^{j+1} - c^j)) + (S^{k+1}, ψ)."""
    weights = system.weights if weights is None else weights
    if len(history) < k + 1:
        raise StepIndexError(f"step {k} needs levels 0..{k}, history holds {len(history)}")
    levels = history.coeffs
    memory = np.zeros(system.size)
    if k > 0:
        increments = np.diff(np.vstack(levels[:k + 1]), axis=0)
        memory = weights.b(np.arange(k, 0, -1)) @ increments
    t_next = system.grid.t(k + 1)
    rhs = weights.mu * (levels[k] - memory) + system.pairing @ _sample(system.problem.source, system.nodes, t_next)
    return banded_lu_solve(system.lu, rhs)


def march(system: AssembledSystem) -> SolutionHistory:
    history = SolutionHistory(problem=system.problem, basis=system.basis, grid=system.grid)
    history.coeffs.append(project_initial(system.problem.initial, system))
    for k in range(system.grid.M):
        history.coeffs.append(step(system, history, k))
    return history


def solve(spec: ProblemSpec, N: int, grid: TimeGrid) -> SolutionHistory:
    started = time.perf_counter()
    history = march(assemble(spec, N, grid))
    logger.info(
        f"Solved {spec.name}: alpha={spec.alpha}, N={N}, M={grid.M}, "
        f"kappa=({spec.kappa1}, {spec.kappa2}) in {time.perf_counter() - started:.3f}s"
    )
    return history


def evaluate(history: SolutionHistory, x: float, k: int) -> float:
    """u_N^k(x); exactly zero at both endpoints."""
    coeffs = history.full_coefficients(k)
    return float(eval_all(history.basis, x) @ coeffs)


def boundary_moments(system: AssembledSystem) -> np.ndarray:
    """(B_{0,N}, ψ_i) and (B_{N,N}, ψ_i) for interior i, shape (N-1, 2)."""
    values = eval_matrix(system.basis, system.nodes)
    return system.pairing @ values[:, [0, -1]]


def determinant_sign(basis: BernsteinBasis, kappa1: float, kappa2: float, mu: float) -> tuple[float, float]:
    """(sign, log|det A|) of the time-step matrix."""
    dense = operator_matrix(basis, kappa1, kappa2, mu).transpose().to_dense()
    sign, logdet = np.linalg.slogdet(dense)
    return float(sign), float(logdet)
