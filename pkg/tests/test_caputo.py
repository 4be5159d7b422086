"""Tests for src/caputo: L1 weights, Caputo derivatives of series and the manufactured examples."""
from math import cos, fsum, gamma, pi, sin

import numpy as np
import pytest

from src.caputo import (
    BuiltinExamples,
    CaputoSeriesError,
    OrderError,
    TimeGrid,
    assembled_source,
    UnknownExampleError,
    builtin_examples,
    caputo_power,
    caputo_quadrature,
    caputo_series,
    caputo_time_factor,
    check_order,
    get_example,
    l1_mu,
    l1_weights,
    manufactured_residual,
    manufactured_source,
)

pytestmark = pytest.mark.unit


# ---------------------------------------------------------------------------
# TimeGrid / L1 weights
# ---------------------------------------------------------------------------

class TestTimeGrid:
    def test_tau(self):
        grid = TimeGrid(M=40)
        assert grid.tau == 1 / 40
        assert grid.t(40) == pytest.approx(1.0)

    def test_times(self):
        assert np.allclose(TimeGrid(M=4, T=2.0).times, [0.0, 0.5, 1.0, 1.5, 2.0])

    def test_zero_steps_rejected(self):
        with pytest.raises(ValueError):
            TimeGrid(M=0)

    def test_nonpositive_final_time_rejected(self):
        with pytest.raises(ValueError):
            TimeGrid(M=10, T=0.0)


class TestL1Weights:
    @pytest.mark.parametrize("alpha", [0.0, 1.0, -0.2, 1.5])
    def test_order_outside_unit_interval(self, alpha):
        with pytest.raises(OrderError):
            check_order(alpha)

    def test_mu(self):
        assert l1_mu(0.5, 1 / 40) == pytest.approx(1 / ((1 / 40) ** 0.5 * gamma(1.5)))

    def test_first_weights(self):
        weights = l1_weights(0.5, TimeGrid(M=10))
        assert weights.b(0) == 1.0
        assert weights.b(1) == pytest.approx(2**0.5 - 1)

    def test_weights_decrease(self):
        b = l1_weights(0.3, TimeGrid(M=100)).table
        assert np.all(np.diff(b) < 0)
        assert np.all(b > 0)

    def test_a_is_shifted_b(self):
        weights = l1_weights(0.7, TimeGrid(M=20))
        assert weights.a(12, 5) == weights.b(7)

    def test_b_beyond_table(self):
        weights = l1_weights(0.5, TimeGrid(M=2))
        assert weights.b(9) == pytest.approx(10**0.5 - 9**0.5)

    @pytest.mark.parametrize("alpha", [0.1, 0.5, 0.9])
    def test_telescoping_sum(self, alpha):
        weights = l1_weights(alpha, TimeGrid(M=200))
        for k in (1, 5, 200):
            assert fsum(weights.b(np.arange(k))) == pytest.approx(k ** (1 - alpha), rel=1e-12)

    def test_history_coefficients(self):
        weights = l1_weights(0.5, TimeGrid(M=10))
        h = weights.history_coefficients(3)
        b = weights.table
        assert np.allclose(h, [1 - b[1], b[1] - b[2], b[2] - b[3], b[3]])
        assert fsum(h) == pytest.approx(1.0, abs=1e-15)

    def test_history_coefficients_at_start(self):
        assert np.array_equal(l1_weights(0.5, TimeGrid(M=10)).history_coefficients(0), [1.0])


# ---------------------------------------------------------------------------
# Caputo derivatives
# ---------------------------------------------------------------------------

class TestCaputoPower:
    def test_constant_has_zero_derivative(self):
        assert caputo_power(0, 0.5, 0.7) == 0.0

    def test_linear(self):
        assert caputo_power(1, 0.5, 1.0) == pytest.approx(1 / gamma(1.5))

    def test_square(self):
        assert caputo_power(2, 0.25, 0.5) == pytest.approx(2 / gamma(2.75) * 0.5**1.75)


class TestCaputoSeries:
    def test_finite_sequence(self):
        assert caputo_series((0.0, 0.0, 1.0), 0.5, 1.0) == pytest.approx(2 / gamma(2.5))

    def test_sine_at_one(self):
        sine = BuiltinExamples.EX1.taylor
        expected = fsum((-1) ** k / gamma(2 * k + 1.5) for k in range(15))
        assert caputo_series(sine, 0.5, 1.0) == pytest.approx(expected, abs=1e-13)
        assert caputo_series(sine, 0.5, 1.0) == pytest.approx(0.846057, abs=1e-6)

    @pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
    @pytest.mark.parametrize("t", [0.1, 0.6, 1.0])
    def test_agrees_with_quadrature(self, alpha, t):
        assert caputo_series(BuiltinExamples.EX1.taylor, alpha, t) == pytest.approx(
            caputo_quadrature(cos, alpha, t), abs=1e-10
        )

    def test_exponential_against_quadrature(self):
        decay = BuiltinExamples.EX4.taylor
        assert caputo_series(decay, 0.5, 0.8) == pytest.approx(
            caputo_quadrature(lambda s: -np.exp(-s), 0.5, 0.8), abs=1e-10
        )

    def test_divergent_generator_raises(self):
        with pytest.raises(CaputoSeriesError):
            caputo_series(lambda m: 1.0, 0.5, 2.0, max_terms=50)

    def test_quadrature_at_zero(self):
        assert caputo_quadrature(cos, 0.5, 0.0) == 0.0


# ---------------------------------------------------------------------------
# Manufactured solutions
# ---------------------------------------------------------------------------

class TestExamples:
    def test_registry(self):
        assert [s.name for s in builtin_examples()] == ["ex1", "ex2", "ex3", "ex4"]

    def test_get_example(self):
        assert get_example("ex3") is BuiltinExamples.EX3

    def test_unknown_example(self):
        with pytest.raises(UnknownExampleError):
            get_example("ex9")

    @pytest.mark.parametrize("name,kappa1,kappa2", [
        ("ex1", 0.1, 2.0),
        ("ex2", 1.0, 1.0),
        ("ex3", 0.2, 1.5),
        ("ex4", 0.1, 2.0),
    ])
    def test_default_coefficients(self, name, kappa1, kappa2):
        solution = get_example(name)
        assert (solution.kappa1, solution.kappa2) == (kappa1, kappa2)

    def test_exact_values(self):
        assert BuiltinExamples.EX1.exact(0.5, pi / 2) == pytest.approx(0.125)
        assert BuiltinExamples.EX2.exact(0.5, 0.0) == pytest.approx(1.0)

    def test_derivatives(self):
        ex2 = BuiltinExamples.EX2
        assert ex2.u_x(0.0, 0.0) == pytest.approx(pi)
        assert ex2.u_xx(0.5, 1.0) == pytest.approx(-pi**2 * np.exp(-1.0))

    def test_vectorised_constant_factor(self):
        xs = np.linspace(0, 1, 5)
        assert BuiltinExamples.EX3.exact(xs, 1.0).shape == (5,)

    @pytest.mark.parametrize("solution", builtin_examples(), ids=lambda s: s.name)
    def test_initial_data_vanishes_at_boundary(self, solution):
        assert np.allclose(solution.initial(np.array([0.0, 1.0])), 0.0, atol=1e-15)

    def test_time_factor_of_square(self):
        assert caputo_time_factor(BuiltinExamples.EX3, 0.5, 0.5) == pytest.approx(2 / gamma(2.5) * 0.5**1.5)


class TestManufacturedSource:
    @pytest.mark.parametrize("solution", builtin_examples(), ids=lambda s: s.name)
    def test_series_residual(self, solution):
        rng = np.random.default_rng(0)
        for x, t in zip(rng.uniform(size=50), rng.uniform(0.01, 1.0, size=50)):
            residual = manufactured_residual(solution, 0.5, solution.kappa1, solution.kappa2, x, t)
            assert abs(float(residual)) <= 1e-10

    @pytest.mark.parametrize("solution", builtin_examples(), ids=lambda s: s.name)
    def test_quadrature_residual(self, solution):
        xs = np.linspace(0.05, 0.95, 7)
        residual = manufactured_residual(solution, 0.25, 1.0, 1.0, xs, 0.7, method="quadrature")
        assert np.abs(residual).max() <= 1e-8

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            manufactured_residual(BuiltinExamples.EX1, 0.5, 1.0, 1.0, 0.5, 0.5, method="guess")

    def test_source_for_sine_example(self):
        ex1 = BuiltinExamples.EX1
        source = manufactured_source(ex1, 0.5, 0.1, 2.0)
        x, t = 0.3, 0.8
        expected = (
            x**2 * (1 - x) * caputo_quadrature(cos, 0.5, t)
            - 0.1 * (2 - 6 * x) * sin(t)
            + 2.0 * (2 * x - 3 * x**2) * sin(t)
        )
        assert source(x, t) == pytest.approx(expected, abs=1e-10)

    @pytest.mark.parametrize("alpha", [0.25, 0.75])
    @pytest.mark.parametrize("solution", builtin_examples(), ids=lambda s: s.name)
    def test_matches_source_assembled_from_u(self, solution, alpha):
        source = manufactured_source(solution, alpha, solution.kappa1, solution.kappa2)
        reference = assembled_source(solution, alpha, solution.kappa1, solution.kappa2)
        rng = np.random.default_rng(7)
        for x, t in zip(rng.uniform(size=10), rng.uniform(0.01, 1.0, size=10)):
            assert float(source(x, t)) == pytest.approx(reference(x, t), abs=1e-8)

    def test_assembled_source_sees_advection_sign(self):
        ex1 = BuiltinExamples.EX1
        source = manufactured_source(ex1, 0.5, 0.1, 2.0)
        flipped = assembled_source(ex1, 0.5, 0.1, -2.0)
        assert abs(float(source(0.3, 0.8)) - flipped(0.3, 0.8)) > 0.5

    def test_invalid_order(self):
        with pytest.raises(OrderError):
            manufactured_source(BuiltinExamples.EX1, 1.2, 0.1, 2.0)
