"""Tests for src/harness: error norms, convergence sweeps, conditioning study and presets."""
import numpy as np
import pytest

from src.caputo import TimeGrid, get_example
from src.harness import (
    PRESETS,
    ConditionRow,
    ErrorReport,
    RateTable,
    conditioning_study,
    convergence_rates,
    energy_weight,
    error_norms,
    reproduce,
    run_case,
    spatial_sweep,
    temporal_sweep,
)
from src.linalg import SingularMatrixError
from src.solver import ProblemSpec, solve

pytestmark = pytest.mark.unit

TABLE1_COND = [5.319, 8.035, 12.910, 27.418, 54.772, 100.749, 210.082, 463.475]


def report(N=4, M=10, l_inf=1e-3, h1w=1e-2):
    return ErrorReport(
        problem="ex1", N=N, M=M, alpha=0.5, kappa1=0.1, kappa2=2.0,
        l_inf=l_inf, l_2=l_inf, l_2_table=l_inf, h1w=h1w,
    )


@pytest.fixture
def sine_history():
    spec = ProblemSpec(kappa1=1.0, kappa2=1.0, alpha=0.5, initial=lambda x: np.sin(np.pi * x), name="sine")
    return solve(spec, 6, TimeGrid(M=10))


# ---------------------------------------------------------------------------
# Rates
# ---------------------------------------------------------------------------

class TestConvergenceRates:
    def test_halving_errors_rate_one(self):
        assert convergence_rates([0.1, 0.05, 0.025], [1e-2, 5e-3, 2.5e-3]) == [None, pytest.approx(1.0), pytest.approx(1.0)]

    def test_zero_error_has_no_rate(self):
        assert convergence_rates([0.1, 0.05], [1e-2, 0.0]) == [None, None]

    def test_time_table_sorted_coarse_to_fine(self):
        table = RateTable.from_reports("time", [report(M=40, l_inf=1e-4), report(M=10, l_inf=1.6e-3)])
        assert [row.report.M for row in table.rows] == [10, 40]
        assert table.rates[1] == pytest.approx(2.0)
        assert table.rows[0].resolution == 0.1

    def test_space_table_uses_inverse_degree(self):
        table = RateTable.from_reports("space", [report(N=8, h1w=1e-4), report(N=4, h1w=1.6e-3)], metric="h1w")
        assert table.errors == [1.6e-3, 1e-4]
        assert table.rates[1] == pytest.approx(4.0)

    def test_with_metric(self):
        table = RateTable.from_reports("time", [report(M=10), report(M=20)])
        assert table.with_metric("h1w").metric == "h1w"

    def test_tau(self):
        assert report(M=40).tau == 0.025


# ---------------------------------------------------------------------------
# Error norms
# ---------------------------------------------------------------------------

class TestErrorNorms:
    def test_exact_equals_approximation(self, sine_history):
        M = sine_history.grid.M
        result = error_norms(
            lambda x, t: sine_history.values(x, M),
            sine_history,
            exact_dx=lambda x, t: sine_history.derivatives(x, M),
        )
        assert (result.l_inf, result.l_2, result.l_2_table, result.h1w) == (0.0, 0.0, 0.0, 0.0)

    def test_constant_error_field(self, sine_history):
        M = sine_history.grid.M
        result = error_norms(
            lambda x, t: sine_history.values(x, M) + 1e-3,
            sine_history,
            exact_dx=lambda x, t: sine_history.derivatives(x, M),
        )
        assert result.l_inf == pytest.approx(1e-3, rel=1e-9)
        assert result.l_2 == pytest.approx(1e-3, rel=1e-9)
        assert result.l_2_table == pytest.approx(1e-3 * np.sqrt(10), rel=1e-9)

    def test_weighted_energy_of_constant_error(self, sine_history):
        M = sine_history.grid.M
        result = error_norms(
            lambda x, t: sine_history.values(x, M) + 1e-3,
            sine_history,
            exact_dx=lambda x, t: sine_history.derivatives(x, M),
        )
        # kappa1 = kappa2 = 1: integral of exp(-x) over [0, 1]
        assert result.h1w == pytest.approx(1e-3 * np.sqrt(1 - np.exp(-1.0)), rel=1e-9)

    def test_needs_derivative(self, sine_history):
        with pytest.raises(ValueError):
            error_norms(lambda x, t: np.zeros_like(x), sine_history)

    def test_earlier_level(self, sine_history):
        zero = lambda x, t: np.zeros_like(x)
        result = error_norms(zero, sine_history, at=0, exact_dx=zero)
        assert result.l_inf == pytest.approx(1.0, abs=1e-2)

    def test_energy_weight(self):
        spec = ProblemSpec(kappa1=0.1, kappa2=2.0, alpha=0.5)
        assert energy_weight(spec, np.array([0.0, 0.05]))[1] == pytest.approx(np.exp(-1.0))

    def test_first_example_table_cell(self):
        result = run_case(ProblemSpec.from_manufactured(get_example("ex1"), 0.25), 4, 10)
        assert result.l_inf == pytest.approx(3.46e-5, rel=0.05)
        assert 7.11e-5 / 2 <= result.l_2_table <= 7.11e-5 * 2
        assert result.runtime > 0

    def test_run_case_needs_exact_solution(self):
        with pytest.raises(ValueError):
            run_case(ProblemSpec(kappa1=1.0, kappa2=1.0, alpha=0.5), 4, 10)


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------

class TestSweeps:
    async def test_temporal_sweep_orders_rows(self):
        spec = ProblemSpec.from_manufactured(get_example("ex1"), 0.5)
        table = await temporal_sweep(spec, 4, [10, 20, 40])
        assert table.mode == "time"
        assert [row.report.M for row in table.rows] == [10, 20, 40]
        assert table.rates[0] is None
        assert all(rate is not None for rate in table.rates[1:])

    async def test_spatial_sweep_metric(self):
        spec = ProblemSpec.from_manufactured(get_example("ex2"), 0.5)
        table = await spatial_sweep(spec, 40, [4, 6, 8])
        assert table.metric == "h1w"
        assert [row.resolution for row in table.rows] == [4.0, 6.0, 8.0]
        assert table.errors[2] < table.errors[0]

    async def test_non_increasing_list_rejected(self):
        spec = ProblemSpec.from_manufactured(get_example("ex1"), 0.5)
        with pytest.raises(ValueError):
            await temporal_sweep(spec, 4, [20, 10])
        with pytest.raises(ValueError):
            await spatial_sweep(spec, 10, [4, 4])

    async def test_runs_are_dispatched_to_threads(self, mocker):
        fake = mocker.patch("src.harness.run_case", side_effect=lambda spec, N, M: report(N=N, M=M))
        spec = ProblemSpec.from_manufactured(get_example("ex1"), 0.5)
        table = await temporal_sweep(spec, 6, [25, 50])
        assert fake.call_count == 2
        assert table.errors == [1e-3, 1e-3]


# ---------------------------------------------------------------------------
# Conditioning
# ---------------------------------------------------------------------------

class TestConditioningStudy:
    def test_first_table_row(self):
        rows = conditioning_study(0.5, 1 / 40, [(0.1, 2.0)], range(4, 12))
        assert [row.N for row in rows] == list(range(4, 12))
        for row, expected in zip(rows, TABLE1_COND):
            assert row.cond == pytest.approx(expected, rel=0.01)

    def test_hilbert_ratio(self):
        row, = conditioning_study(0.5, 1 / 40, [(0.1, 2.0)], [4])
        assert row.hilbert_cond == pytest.approx(28375.0)
        assert row.ratio == pytest.approx(1.87e-4, rel=0.02)
        assert row.status == "ok"

    def test_all_pairs_reported(self):
        rows = conditioning_study(0.5, 1 / 40, [(0.1, 2.0), (1.0, 1.0)], [4, 5])
        assert [(row.kappa1, row.N) for row in rows] == [(0.1, 4), (0.1, 5), (1.0, 4), (1.0, 5)]
        assert all(row.cond > 1 for row in rows)

    def test_singular_operator_recorded(self, mocker):
        mocker.patch("src.harness.inf_condition_number", side_effect=SingularMatrixError("zero pivot", pivot=0))
        row, = conditioning_study(0.5, 1 / 40, [(1.0, 1.0)], [4])
        assert row.status == "singular"
        assert row.cond is None
        assert isinstance(row, ConditionRow)


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------

class TestReproduce:
    def test_preset_names(self):
        assert sorted(PRESETS) == ["fig1", "fig2", "table1", "table2", "table3", "table4"]

    async def test_unknown_preset(self):
        with pytest.raises(ValueError):
            await reproduce("table9")

    async def test_table1(self):
        tables = await reproduce("table1")
        rows = tables["table1"]
        assert len(rows) == 16
        assert rows[0].cond == pytest.approx(5.319, rel=0.01)


@pytest.mark.integration
class TestReferenceErrors:
    def test_third_example(self):
        result = run_case(ProblemSpec.from_manufactured(get_example("ex3"), 0.5), 6, 80)
        assert result.l_inf == pytest.approx(1.857e-5, rel=0.02)
        assert result.l_2_table == pytest.approx(4.365e-5, rel=0.02)

    def test_third_example_fine(self):
        result = run_case(ProblemSpec.from_manufactured(get_example("ex3"), 0.5), 10, 320)
        assert result.l_inf == pytest.approx(3.344e-7, rel=0.02)

    def test_fourth_example(self):
        result = run_case(ProblemSpec.from_manufactured(get_example("ex4"), 0.75), 14, 100)
        assert result.l_inf == pytest.approx(5.303e-5, rel=0.02)
        assert result.l_2_table == pytest.approx(1.12e-4, rel=0.05)


@pytest.mark.integration
@pytest.mark.slow
class TestSpectralDecay:
    async def test_second_example_weighted_energy(self):
        spec = ProblemSpec.from_manufactured(get_example("ex2"), 0.5)
        table = await spatial_sweep(spec, 400, [4, 6, 8, 10, 12, 14])
        errors = table.errors
        assert all(b < a for a, b in zip(errors, errors[1:]))
        assert errors[0] / errors[-1] >= 1e3
        assert errors[0] == pytest.approx(1.789e-1, rel=0.02)

    @pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
    async def test_temporal_rates(self, alpha):
        spec = ProblemSpec.from_manufactured(get_example("ex4"), alpha)
        table = await temporal_sweep(spec, 14, [25, 50, 100, 200, 400])
        assert all(b < a for a, b in zip(table.errors, table.errors[1:]))
        for rate in table.rates[2:]:
            assert rate == pytest.approx(2 - alpha, abs=0.05)

    async def test_largest_order_reference_errors(self):
        spec = ProblemSpec.from_manufactured(get_example("ex4"), 0.75)
        table = await temporal_sweep(spec, 14, [100, 200, 400])
        assert table.errors == pytest.approx([5.351e-5, 2.248e-5, 9.450e-6], rel=0.02)
