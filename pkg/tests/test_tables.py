"""Tests for src/harness/tables.py: CSV formatting, round trips and matrix dumps."""
import pytest

from src.harness.models import ConditionRow, ErrorReport, RateTable
from src.harness.tables import (
    format_dense,
    format_value,
    matrix_triples,
    parse_value,
    read_table,
    records,
    summarize,
    summarize_condition,
    write_table,
)
from src.opmatrix import build_integer_derivative_matrix

pytestmark = pytest.mark.unit


def report(N=4, M=10, l_inf=1.219e-4):
    return ErrorReport(
        problem="ex1", N=N, M=M, alpha=0.5, kappa1=0.1, kappa2=2.0,
        l_inf=l_inf, l_2=l_inf / 2, l_2_table=l_inf, h1w=l_inf * 3, runtime=0.25,
    )


# ---------------------------------------------------------------------------
# Values
# ---------------------------------------------------------------------------

class TestFormatValue:
    def test_float_scientific(self):
        assert format_value(0.000121875) == "1.218750e-04"

    def test_int_plain(self):
        assert format_value(14) == "14"

    def test_none_empty(self):
        assert format_value(None) == ""

    def test_bool(self):
        assert format_value(True) == "true"

    def test_string(self):
        assert format_value("ex2") == "ex2"


class TestParseValue:
    @pytest.mark.parametrize("text,expected", [
        ("14", 14),
        ("1.218750e-04", 1.21875e-4),
        ("", None),
        ("false", False),
        ("singular", "singular"),
    ])
    def test_parse(self, text, expected):
        assert parse_value(text) == expected

    def test_int_stays_int(self):
        assert isinstance(parse_value("7"), int)


# ---------------------------------------------------------------------------
# Tables
# ---------------------------------------------------------------------------

class TestWriteTable:
    def test_header_and_rows(self, tmp_path):
        path = write_table([report(), report(N=6, M=20)], tmp_path / "errors.csv")
        lines = path.read_text().splitlines()
        assert lines[0].split(",")[:3] == ["problem", "N", "M"]
        assert lines[1].startswith("ex1,4,10,1.000000e+00,5.000000e-01")
        assert len(lines) == 3

    def test_creates_parent_directory(self, tmp_path):
        path = write_table([report()], tmp_path / "a" / "b" / "errors.csv")
        assert path.exists()

    def test_round_trip_is_byte_identical(self, tmp_path):
        first = write_table([report(l_inf=3.4567891234e-5), report(N=8, l_inf=2.2e-7)], tmp_path / "first.csv")
        rows = read_table(first)
        second = write_table(rows, tmp_path / "second.csv")
        assert first.read_bytes() == second.read_bytes()
        assert rows[0]["l_inf"] == 3.456789e-05
        assert rows[1]["N"] == 8

    def test_rate_table_flattened(self, tmp_path):
        table = RateTable.from_reports("time", [report(M=10, l_inf=1e-3), report(M=20, l_inf=2.5e-4)])
        rows = read_table(write_table(table, tmp_path / "rates.csv"))
        assert [row["mode"] for row in rows] == ["time", "time"]
        assert rows[0]["rate"] is None
        assert rows[1]["rate"] == pytest.approx(2.0)
        assert rows[1]["M"] == 20

    def test_condition_rows(self, tmp_path):
        rows = [
            ConditionRow(N=4, alpha=0.5, tau=0.025, kappa1=0.1, kappa2=2.0, cond=5.319, hilbert_cond=28375.0, ratio=1.87e-4),
            ConditionRow(N=5, alpha=0.5, tau=0.025, kappa1=0.1, kappa2=2.0, hilbert_cond=943656.0, status="singular"),
        ]
        parsed = read_table(write_table(rows, tmp_path / "cond.csv"))
        assert parsed[0]["cond"] == 5.319
        assert parsed[1]["cond"] is None
        assert parsed[1]["status"] == "singular"

    def test_records_of_models(self):
        assert records([report()])[0]["problem"] == "ex1"

    def test_empty_table(self, tmp_path):
        path = write_table([], tmp_path / "empty.csv")
        assert path.read_text() == "\n"


# ---------------------------------------------------------------------------
# Matrix dumps and summaries
# ---------------------------------------------------------------------------

class TestMatrixDump:
    def test_triples_skip_zeros(self):
        triples = matrix_triples(build_integer_derivative_matrix(3, 1))
        assert len(triples) == 10
        assert triples[0] == {"row": 0, "col": 0, "value": -3}

    def test_dense_text(self):
        text = format_dense(build_integer_derivative_matrix(2, 1))
        assert text.splitlines()[0].split() == ["-2", "-1", "0"]
        assert len(text.splitlines()) == 3

    def test_triples_csv(self, tmp_path):
        path = write_table(matrix_triples(build_integer_derivative_matrix(3, 1)), tmp_path / "d1.csv")
        assert path.read_text().splitlines()[:2] == ["row,col,value", "0,0,-3"]


class TestSummaries:
    def test_error_summary(self):
        text = summarize(report())
        assert "N=4" in text
        assert "L_inf=1.219e-04" in text

    def test_condition_summary(self):
        row = ConditionRow(N=4, alpha=0.5, tau=0.025, kappa1=0.1, kappa2=2.0, cond=5.319, hilbert_cond=28375.0, ratio=1.87e-4)
        assert "C_inf=5.319" in summarize_condition(row)

    def test_singular_summary(self):
        row = ConditionRow(N=4, alpha=0.5, tau=0.025, kappa1=0.1, kappa2=2.0, hilbert_cond=28375.0, status="singular")
        assert summarize_condition(row).endswith("singular")
