from math import log
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

Metric = Literal["l_inf", "l_2", "l_2_table", "h1w"]


class ErrorReport(BaseModel):
    """Errors of one run at its final time level.

    l_2 is the root mean square over x_j = j/𝒩, j < 𝒩; l_2_table is
    (𝒩^{-1/2} sum_j e_j^2)^{1/2}, the scaling of the reference error tables.
    """
    model_config = ConfigDict(frozen=True)

    problem: str
    N: int
    M: int
    T: float = 1.0
    alpha: float
    kappa1: float
    kappa2: float
    l_inf: float = Field(ge=0)
    l_2: float = Field(ge=0)
    l_2_table: float = Field(ge=0)
    h1w: float = Field(ge=0)
    runtime: float = Field(default=0.0, ge=0)

    @property
    def tau(self) -> float:
        return self.T / self.M

    def metric(self, name: Metric) -> float:
        return getattr(self, name)


class RateRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    resolution: float
    error: float
    rate: Optional[float] = None
    report: ErrorReport


def convergence_rates(steps: List[float], errors: List[float]) -> List[Optional[float]]:
    """log(E_i / E_{i-1}) / log(h_i / h_{i-1}) from the second entry on."""
    rates: List[Optional[float]] = [None]
    for i in range(1, len(errors)):
        if errors[i] > 0 and errors[i - 1] > 0 and steps[i] != steps[i - 1]:
            rates.append(log(errors[i] / errors[i - 1]) / log(steps[i] / steps[i - 1]))
        else:
            rates.append(None)
    return rates


class RateTable(BaseModel):
    """Errors and observed orders of a sweep in τ ("time") or in N ("space")."""
    model_config = ConfigDict(frozen=True)

    mode: Literal["time", "space"]
    metric: Metric
    rows: List[RateRow]

    @classmethod
    def from_reports(cls, mode: str, reports: List[ErrorReport], metric: Metric = "l_inf") -> "RateTable":
        if mode == "time":
            reports = sorted(reports, key=lambda r: r.tau, reverse=True)
            resolutions = [r.tau for r in reports]
            steps = resolutions
        else:
            reports = sorted(reports, key=lambda r: r.N)
            resolutions = [float(r.N) for r in reports]
            steps = [1.0 / r.N for r in reports]
        errors = [r.metric(metric) for r in reports]
        rows = [
            RateRow(resolution=res, error=err, rate=rate, report=report)
            for res, err, rate, report in zip(resolutions, errors, convergence_rates(steps, errors), reports)
        ]
        return cls(mode=mode, metric=metric, rows=rows)

    def with_metric(self, metric: Metric) -> "RateTable":
        return RateTable.from_reports(self.mode, [row.report for row in self.rows], metric)

    @property
    def rates(self) -> List[Optional[float]]:
        return [row.rate for row in self.rows]

    @property
    def errors(self) -> List[float]:
        return [row.error for row in self.rows]


class ConditionRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    N: int
    alpha: float
    tau: float
    kappa1: float
    kappa2: float
    cond: Optional[float] = None
    hilbert_cond: float
    ratio: Optional[float] = None
    status: Literal["ok", "singular"] = "ok"


class PropertyResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    passed: bool
    defect: float
    detail: str = ""


class VerificationReport(BaseModel):
    seed: int
    results: List[PropertyResult]

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    @property
    def failures(self) -> List[PropertyResult]:
        return [result for result in self.results if not result.passed]
