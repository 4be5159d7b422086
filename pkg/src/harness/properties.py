"""Named structural and numerical properties, checked by `verify`.

Each check takes a seeded numpy Generator and returns a PropertyResult
with the measured defect. Matrix identities are checked in exact integer
or Fraction arithmetic on [0, 1]; floating-point checks compare against
tolerances scaled by the magnitude of the quantities involved.
"""
import logging
import tempfile
from fractions import Fraction
from math import ceil, comb, fsum, perm
from pathlib import Path
from typing import Callable, Dict, Optional

import numpy as np
import sympy as sp

from ..bernstein import (
    BernsteinBasis,
    degree_elevate,
    derivative_expansion,
    dual_coefficients,
    dual_coefficients_exact,
    eval_matrix,
    gram_matrix_exact,
)
from ..caputo import (
    builtin_examples,
    caputo_power,
    caputo_quadrature,
    caputo_series,
    get_example,
    l1_mu,
    l1_weights,
    assembled_source,
    manufactured_source,
    TimeGrid,
)
from ..linalg import banded_lu_factor, banded_lu_solve, gauss_legendre, hilbert_condition_number, inf_condition_number
from ..opmatrix import (
    BandedMatrix,
    band_matvec,
    build_derivative_matrix,
    build_integer_derivative_matrix,
    build_interior_pair,
    exact_power,
    interior_norm_closed_forms,
    neumann_inverse,
    nilpotency_index,
)
from ..solver import ProblemSpec, assemble, boundary_moments, operator_matrix, solve
from . import energy_norm, error_norms, run_case, weighted_norm
from .models import ErrorReport, PropertyResult, RateTable, VerificationReport
from .tables import format_value, read_table, write_table

logger = logging.getLogger(__name__)

Check = Callable[[np.random.Generator], PropertyResult]
PROPERTIES: Dict[str, Check] = {}


def prop(name: str):
    def register(check: Check) -> Check:
        PROPERTIES[name] = check
        return check
    return register


def _result(name: str, defect: float, tol: float, detail: str = "") -> PropertyResult:
    return PropertyResult(name=name, passed=bool(defect <= tol), defect=float(defect), detail=detail)


def _exact_defect(values) -> float:
    return float(max((abs(v) for v in np.asarray(values, dtype=object).flat), default=0))


# -------------------------------------------------------------------------
# Bernstein basis
# -------------------------------------------------------------------------

@prop("partition_of_unity")
def partition_of_unity(rng: np.random.Generator) -> PropertyResult:
    xs = np.concatenate(([0.0, 1.0], rng.uniform(size=25)))
    defect = max(np.abs(eval_matrix(BernsteinBasis(degree=N), xs).sum(axis=1) - 1).max() for N in range(16))
    return _result("partition_of_unity", defect, 1e-13, "N = 0..15")


@prop("degree_elevation")
def degree_elevation(rng: np.random.Generator) -> PropertyResult:
    xs = rng.uniform(size=25)
    defect, negative = 0.0, 0
    for N in range(1, 11):
        upper = eval_matrix(BernsteinBasis(degree=N), xs)
        for j in range(1, N + 1):
            lower = eval_matrix(BernsteinBasis(degree=N - j), xs)
            for i in range(N - j + 1):
                coeffs = degree_elevate(i, N, j)
                negative += sum(c < 0 for c in coeffs.values())
                elevated = sum(c * upper[:, r] for r, c in coeffs.items())
                defect = max(defect, np.abs(elevated - lower[:, i]).max())
    return _result("degree_elevation", defect + negative, 1e-12, f"{negative} negative coefficients")


@prop("derivative_oracle")
def derivative_oracle(rng: np.random.Generator) -> PropertyResult:
    """D_p^T c against symbolic differentiation of the monomial form."""
    x = sp.Symbol("x")
    points = rng.uniform(size=25)
    worst = 0.0
    for N in range(1, 13):
        basis = BernsteinBasis(degree=N)
        values = eval_matrix(basis, points)
        c = rng.integers(-10, 11, size=N + 1)
        poly = sp.Poly(sum(int(c[i]) * comb(N, i) * x**i * (1 - x) ** (N - i) for i in range(N + 1)), x)
        for p in range(1, N + 1):
            poly = poly.diff(x)
            exact = np.array([float(poly.eval(sp.Rational(float(v)))) for v in points])
            banded = values @ band_matvec(build_derivative_matrix(basis, p).transpose(), c.astype(float))
            scale = max(np.abs(exact).max(), 1.0)
            worst = max(worst, np.abs(banded - exact).max() / scale)
    return _result("derivative_oracle", worst, 1e-10, "N <= 12, p <= N, 25 points")


@prop("bandwidth")
def bandwidth(rng: np.random.Generator) -> PropertyResult:
    outside = 0
    for N in range(1, 16):
        basis = BernsteinBasis(degree=N)
        for p in range(1, min(N, 4) + 1):
            dense = build_integer_derivative_matrix(N, p).to_dense()
            rows, cols = np.nonzero(dense != 0)
            outside += int(np.sum(np.abs(rows - cols) > p))
            outside += sum(len(derivative_expansion(i, basis, p).entries) > 2 * p + 1 for i in range(N + 1))
    return _result("bandwidth", outside, 0, "entries with |i - j| > p")


@prop("dual_symmetry")
def dual_symmetry(rng: np.random.Generator) -> PropertyResult:
    defect = max(np.abs(d - d.T).max() for d in (dual_coefficients(BernsteinBasis(degree=N)).d for N in range(16)))
    return _result("dual_symmetry", defect, 0.0)


@prop("biorthogonality")
def biorthogonality(rng: np.random.Generator) -> PropertyResult:
    """Exact d G = I, plus the float dual against a quadrature Gram matrix."""
    exact_defect, float_defect = 0.0, 0.0
    rule = gauss_legendre(20)
    for N in range(1, 16):
        identity = np.eye(N + 1, dtype=int).astype(object)
        exact_defect = max(exact_defect, _exact_defect(np.dot(dual_coefficients_exact(N), gram_matrix_exact(N)) - identity))
        dual = dual_coefficients(BernsteinBasis(degree=N))
        values = eval_matrix(dual.basis, rule.nodes)
        gram = values.T @ (values * rule.weights[:, None])
        float_defect = max(float_defect, np.abs(dual.d @ gram - np.eye(N + 1)).max() / dual.magnitude)
    detail = f"exact defect {exact_defect}, float defect relative to max|d|"
    return _result("biorthogonality", float_defect + exact_defect, 1e-13, detail)


# -------------------------------------------------------------------------
# Operational matrices
# -------------------------------------------------------------------------

@prop("column_sums")
def column_sums(rng: np.random.Generator) -> PropertyResult:
    defect = max(
        _exact_defect(build_integer_derivative_matrix(N, p).to_dense().sum(axis=0))
        for N in range(1, 13)
        for p in range(1, N + 1)
    )
    return _result("column_sums", defect, 0, "exact, N <= 12")


@prop("nilpotency")
def nilpotency(rng: np.random.Generator) -> PropertyResult:
    wrong = [
        (N, p)
        for N in range(1, 11)
        for p in range(1, N + 1)
        if nilpotency_index(build_integer_derivative_matrix(N, p)) != ceil((N + 1) / p)
    ]
    return _result("nilpotency", len(wrong), 0, f"mismatches {wrong}" if wrong else "index ceil((N+1)/p)")


@prop("d1_power_rows")
def d1_power_rows(rng: np.random.Generator) -> PropertyResult:
    defect = 0
    for N in range(1, 9):
        power = exact_power(build_integer_derivative_matrix(N, 1), N)
        c_nn = (-1) ** N * perm(N, N)
        expected = np.array([[c_nn * (-1) ** i * comb(N, i)] * (N + 1) for i in range(N + 1)], dtype=object)
        defect = max(defect, _exact_defect(power - expected))
    return _result("d1_power_rows", defect, 0, "(D_1^N)_ij = c_NN (-1)^i C(N, i)")


@prop("reflection")
def reflection(rng: np.random.Generator) -> PropertyResult:
    defect = 0
    for N in range(1, 11):
        for p in range(1, N + 1):
            dense = build_integer_derivative_matrix(N, p).to_dense()
            defect = max(defect, _exact_defect(dense - (-1) ** p * dense[::-1, ::-1]))
    return _result("reflection", defect, 0)


@prop("trace_charpoly")
def trace_charpoly(rng: np.random.Generator) -> PropertyResult:
    lam = sp.Symbol("lambda")
    defect = 0
    for N in range(1, 11):
        for p in range(1, N + 1):
            dense = build_integer_derivative_matrix(N, p).to_dense()
            defect = max(defect, abs(sum(dense.diagonal())))
            if N <= 8:
                charpoly = sp.Matrix(dense.tolist()).charpoly(lam).as_expr()
                defect = max(defect, 0 if sp.expand(charpoly - lam ** (N + 1)) == 0 else 1)
    return _result("trace_charpoly", defect, 0, "all eigenvalues zero")


@prop("neumann")
def neumann(rng: np.random.Generator) -> PropertyResult:
    """(I - c D_p) sum_k c^k D_p^k = I exactly."""
    defect = 0
    for N in range(1, 9):
        identity = np.eye(N + 1, dtype=int).astype(object)
        for p in (1, 2):
            if p > N:
                continue
            matrix = build_integer_derivative_matrix(N, p)
            for c in (Fraction(1), Fraction(-1), Fraction(1, 2), Fraction(-1, 2)):
                inverse = neumann_inverse(matrix, c)
                defect = max(defect, _exact_defect(np.dot(identity - c * matrix.to_dense(), inverse) - identity))
    return _result("neumann", float(defect), 0, "c in {1, -1, 1/2, -1/2}")


@prop("product_consistency")
def product_consistency(rng: np.random.Generator) -> PropertyResult:
    defect = 0
    for N in range(1, 11):
        first = build_integer_derivative_matrix(N, 1)
        for p in range(2, N + 1):
            defect = max(defect, _exact_defect(exact_power(first, p) - build_integer_derivative_matrix(N, p).to_dense()))
    return _result("product_consistency", defect, 0, "D_p = D_1^p")


@prop("interior_norms")
def interior_norms(rng: np.random.Generator) -> PropertyResult:
    mismatches = []
    for N in range(4, 31):
        first, second = build_interior_pair(BernsteinBasis(degree=N))
        closed_first, closed_second = interior_norm_closed_forms(N)
        if first.inf_norm() != closed_first:
            mismatches.append((N, 1))
        if closed_second is not None and second.inf_norm() != closed_second:
            mismatches.append((N, 2))
    return _result("interior_norms", len(mismatches), 0, f"mismatches {mismatches}" if mismatches else "N = 4..30")


# -------------------------------------------------------------------------
# Linear algebra
# -------------------------------------------------------------------------

@prop("quadrature_exactness")
def quadrature_exactness(rng: np.random.Generator) -> PropertyResult:
    defect, nonpositive = 0.0, 0
    for n in (2, 5, 20):
        rule = gauss_legendre(n)
        nonpositive += int(np.sum(rule.weights <= 0)) + int(np.any(np.diff(rule.nodes) <= 0))
        for k in range(2 * n):
            defect = max(defect, abs(rule.weights @ rule.nodes**k - 1.0 / (k + 1)))
    return _result("quadrature_exactness", defect + nonpositive, 1e-14, "monomials up to degree 2n-1")


@prop("lu_reconstruction")
def lu_reconstruction(rng: np.random.Generator) -> PropertyResult:
    defect = 0.0
    for kl in range(1, 5):
        for ku in range(1, 5):
            n = int(rng.integers(3, 61))
            rows, cols = np.indices((n, n))
            dense = np.where((rows - cols <= kl) & (cols - rows <= ku), rng.uniform(-1, 1, (n, n)), 0.0)
            dense += (kl + ku + 2) * np.eye(n)
            lu = banded_lu_factor(BandedMatrix.from_dense(dense, kl, ku))
            inverse = banded_lu_solve(lu, np.eye(n))
            defect = max(defect, np.abs(inverse @ dense - np.eye(n)).max())
    return _result("lu_reconstruction", defect, 1e-12, "bandwidths 1..4, sizes 3..60")


@prop("condition_consistency")
def condition_consistency(rng: np.random.Generator) -> PropertyResult:
    defect = abs(inf_condition_number(BandedMatrix.identity(5)) - 1.0)
    defect += abs(hilbert_condition_number(4) - 28375.0) / 28375.0
    mu = l1_mu(0.5, 1 / 40)
    for N in range(4, 12):
        m = operator_matrix(BernsteinBasis(degree=N), 0.1, 2.0, mu)
        reference = np.linalg.cond(m.to_dense(), np.inf)
        defect = max(defect, abs(inf_condition_number(m) - reference) / reference)
    return _result("condition_consistency", defect, 1e-10)


# -------------------------------------------------------------------------
# Caputo derivative
# -------------------------------------------------------------------------

@prop("l1_telescoping")
def l1_telescoping(rng: np.random.Generator) -> PropertyResult:
    defect = 0.0
    for alpha in rng.uniform(0.05, 0.95, size=5):
        weights = l1_weights(alpha, TimeGrid(M=200))
        for k in (1, 2, 17, 200):
            defect = max(defect, abs(fsum(weights.b(np.arange(k))) - k ** (1 - alpha)) / k ** (1 - alpha))
            defect = max(defect, abs(fsum(weights.history_coefficients(k)) - 1.0))
    return _result("l1_telescoping", defect, 1e-12)


@prop("l1_relation")
def l1_relation(rng: np.random.Generator) -> PropertyResult:
    weights = l1_weights(float(rng.uniform(0.05, 0.95)), TimeGrid(M=50))
    k = np.arange(1, 51)[:, None]
    j = np.arange(50)[None, :]
    mask = j < k
    defect = np.abs(weights.a(k, j)[mask] - weights.b((k - j)[mask])).max()
    return _result("l1_relation", defect, 0.0, "a_{k,j} = b_{k-j}")


@prop("caputo_oracle")
def caputo_oracle(rng: np.random.Generator) -> PropertyResult:
    defect = 0.0
    sine = get_example("ex1")
    for alpha in (0.25, 0.5, 0.75):
        for t in rng.uniform(0.05, 1.0, size=4):
            for m in range(1, 6):
                series = [0.0] * m + [1.0]
                defect = max(defect, abs(caputo_series(series, alpha, t) - caputo_power(m, alpha, t)))
            by_series = caputo_series(sine.taylor, alpha, t)
            defect = max(defect, abs(by_series - caputo_quadrature(sine.theta_t, alpha, t)))
    return _result("caputo_oracle", defect, 1e-9, "series against power rule and quadrature")


@prop("manufactured_residual")
def manufactured_residual_check(rng: np.random.Generator) -> PropertyResult:
    """manufactured_source against S assembled from u in sympy with a quadrature Caputo term."""
    defect = 0.0
    for solution in builtin_examples():
        for alpha in (0.25, 0.5, 0.75):
            source = manufactured_source(solution, alpha, solution.kappa1, solution.kappa2)
            reference = assembled_source(solution, alpha, solution.kappa1, solution.kappa2)
            xs = rng.uniform(size=50)
            ts = rng.uniform(0.01, 1.0, size=50)
            for x, t in zip(xs, ts):
                defect = max(defect, abs(float(source(x, t)) - reference(x, t)))
    return _result("manufactured_residual", defect, 1e-8, "50 random (x, t) per example and order")


# -------------------------------------------------------------------------
# Solver
# -------------------------------------------------------------------------

def _sine_problem(kappa1: float = 1.0, kappa2: float = 1.0, alpha: float = 0.5) -> ProblemSpec:
    return ProblemSpec(
        kappa1=kappa1, kappa2=kappa2, alpha=alpha, initial=lambda x: np.sin(np.pi * x), name="sine",
    )


@prop("matrix_identity")
def matrix_identity(rng: np.random.Generator) -> PropertyResult:
    defect = 0.0
    for N in (3, 6, 10, 14):
        spec = _sine_problem(kappa1=0.1, kappa2=2.0)
        system = assemble(spec, N, TimeGrid(M=40))
        first, second = build_interior_pair(system.basis)
        expected = system.mu * np.eye(N - 1) - 0.1 * second.to_dense().T + 2.0 * first.to_dense().T
        defect = max(defect, np.abs(system.A.to_dense() - expected).max() / np.abs(expected).max())
    return _result("matrix_identity", defect, 1e-13)


@prop("grid_invariance")
def grid_invariance(rng: np.random.Generator) -> PropertyResult:
    spec = _sine_problem()
    short = assemble(spec, 8, TimeGrid(M=10, T=1.0))
    long = assemble(spec, 8, TimeGrid(M=20, T=2.0))
    same = np.array_equal(short.A.ab, long.A.ab) and np.array_equal(short.lu.factors, long.lu.factors)
    return _result("grid_invariance", 0 if same else 1, 0, "equal tau gives bit-identical A")


@prop("dual_pairing")
def dual_pairing(rng: np.random.Generator) -> PropertyResult:
    """(u_N, ψ_i) by quadrature recovers the interior coefficients."""
    defect = 0.0
    for N in range(2, 16):
        system = assemble(_sine_problem(), N, TimeGrid(M=10))
        c = rng.uniform(-1, 1, size=N - 1)
        values = eval_matrix(system.basis, system.nodes) @ np.concatenate(([0.0], c, [0.0]))
        defect = max(defect, np.abs(system.pairing @ values - c).max())
    return _result("dual_pairing", defect, 1e-8, "N = 2..15")


@prop("boundary_vectors")
def boundary_vectors(rng: np.random.Generator) -> PropertyResult:
    defect = 0.0
    for N in range(2, 13):
        system = assemble(_sine_problem(), N, TimeGrid(M=10))
        defect = max(defect, np.abs(boundary_moments(system)).max() / system.dual.magnitude)
    return _result("boundary_vectors", defect, 1e-13, "(B_0, ψ_i) and (B_N, ψ_i), relative to max|d|")


@prop("zero_fixed_point")
def zero_fixed_point(rng: np.random.Generator) -> PropertyResult:
    history = solve(ProblemSpec(kappa1=1.0, kappa2=1.0, alpha=0.5, name="zero"), 6, TimeGrid(M=20))
    return _result("zero_fixed_point", float(np.abs(history.as_array()).max()), 0.0)


@prop("stability")
def stability(rng: np.random.Generator) -> PropertyResult:
    """max_{1<=k<=M} ||u^k||_{1,w} / ||u^0||_w for S = 0, g = sin(pi x), M = 200.

    k = 0 is excluded since the slope term makes ||u^0||_{1,w} > ||u^0||_w.
    N = 2 and N = 3 exceed the bound (N = 2: 1.03 at κ = (1, 1), 1.51 at
    κ = (0.1, 2); N = 3: 1.30 at κ = (0.1, 2)).
    """
    worst = 0.0
    for kappa1, kappa2 in ((1.0, 1.0), (0.1, 2.0)):
        for N in range(4, 13):
            history = solve(_sine_problem(kappa1, kappa2), N, TimeGrid(M=200))
            initial = weighted_norm(history, 0)
            growth = max(energy_norm(history, k) for k in range(1, len(history))) / initial
            worst = max(worst, growth)
    return _result("stability", worst, 1.0 + 1e-8, "growth ratio of the weighted energy norm, N = 4..12")


@prop("temporal_rates")
def temporal_rates(rng: np.random.Generator) -> PropertyResult:
    """Observed L∞ orders in τ for the fourth example at N = 14 approach 2 - α."""
    defect = 0.0
    spec = get_example("ex4")
    for alpha in (0.25, 0.5, 0.75):
        problem = ProblemSpec.from_manufactured(spec, alpha)
        reports = [run_case(problem, 14, M) for M in (25, 50, 100, 200, 400)]
        rates = RateTable.from_reports("time", reports).rates
        defect = max(defect, max(abs(rate - (2.0 - alpha)) for rate in rates[2:]))
    return _result("temporal_rates", defect, 0.05, "M = 25..400, finest three ratios")


@prop("error_norm_consistency")
def error_norm_consistency(rng: np.random.Generator) -> PropertyResult:
    spec = ProblemSpec.from_manufactured(get_example("ex1"), 0.5)
    history = solve(spec, 4, TimeGrid(M=10))
    report = error_norms(spec.exact, history)
    rule = gauss_legendre(20)
    errors = spec.exact(rule.nodes, 1.0) - history.values(rule.nodes, history.grid.M)
    quadrature = float(np.sqrt(rule.weights @ errors**2))
    return _result("error_norm_consistency", abs(report.l_2 - quadrature) / quadrature, 0.05)


@prop("csv_round_trip")
def csv_round_trip(rng: np.random.Generator) -> PropertyResult:
    reports = [
        ErrorReport(
            problem="ex1", N=int(N), M=int(10 * N), alpha=0.5, kappa1=0.1, kappa2=2.0,
            l_inf=float(e), l_2=float(e / 3), l_2_table=float(e / 3 * np.sqrt(10)), h1w=float(e * 7),
        )
        for N, e in zip(range(4, 10), rng.uniform(1e-9, 1e-3, size=6))
    ]
    with tempfile.TemporaryDirectory() as tmp:
        first = write_table(reports, Path(tmp) / "first.csv")
        rows = read_table(first)
        second = write_table(rows, Path(tmp) / "second.csv")
        same_bytes = first.read_bytes() == second.read_bytes()
    mismatched = sum(
        row["l_inf"] != float(format_value(report.l_inf)) or row["N"] != report.N
        for row, report in zip(rows, reports)
    )
    return _result("csv_round_trip", mismatched + (0 if same_bytes else 1), 0)


def verify(seed: int = 0, filter: Optional[str] = None) -> VerificationReport:
    """Run every registered property, or those whose name contains `filter`."""
    results = []
    for name, check in PROPERTIES.items():
        if filter and filter not in name:
            continue
        result = check(np.random.default_rng(seed))
        level = logging.INFO if result.passed else logging.ERROR
        logger.log(level, f"{'PASS' if result.passed else 'FAIL'} {name}: defect={result.defect:.3e} {result.detail}")
        results.append(result)
    if not results:
        raise ValueError(f"no property matches {filter!r}")
    return VerificationReport(seed=seed, results=results)
