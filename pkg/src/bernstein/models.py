from dataclasses import dataclass
from typing import Dict

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class DomainError(ValueError):
    """Raised when a point lies outside the basis interval."""


class DegreeError(ValueError):
    """Raised for inconsistent degrees, orders or basis indices."""


class Interval(BaseModel):
    model_config = ConfigDict(frozen=True)

    a: float = 0.0
    b: float = 1.0

    @model_validator(mode="after")
    def check_ordered(self) -> "Interval":
        if not self.a < self.b:
            raise ValueError(f"interval needs a < b, got [{self.a}, {self.b}]")
        return self

    @property
    def length(self) -> float:
        return self.b - self.a

    def contains(self, x: float) -> bool:
        return self.a <= x <= self.b

    def to_unit(self, x):
        return (x - self.a) / self.length

    def from_unit(self, s):
        return self.a + self.length * s


class BernsteinBasis(BaseModel):
    """Degree-N Bernstein basis B_{0,N}, ..., B_{N,N} on an interval."""
    model_config = ConfigDict(frozen=True)

    degree: int = Field(ge=0)
    interval: Interval = Interval()

    @property
    def size(self) -> int:
        return self.degree + 1

    def lowered(self, p: int) -> "BernsteinBasis":
        if not 0 <= p <= self.degree:
            raise DegreeError(f"cannot lower degree {self.degree} by {p}")
        return BernsteinBasis(degree=self.degree - p, interval=self.interval)


class ExpansionCoefficients(BaseModel):
    """Sparse combination scale * sum_j entries[j] B_{j,degree}.

    Produced for the p-th derivative of B_{i,N}: either over the same
    degree (at most 2p+1 entries ω_{i,j}) or over degree N-p.
    """
    model_config = ConfigDict(frozen=True)

    i: int
    p: int
    degree: int
    scale: float
    entries: Dict[int, float]

    def dense(self) -> list[float]:
        row = [0.0] * (self.degree + 1)
        for j, value in self.entries.items():
            row[j] = self.scale * value
        return row


@dataclass(frozen=True)
class DualCoefficients:
    """B*_{i,N} = sum_j d[i, j] B_{j,N}, biorthogonal to the Bernstein basis."""
    basis: BernsteinBasis
    d: np.ndarray

    @property
    def degree(self) -> int:
        return self.basis.degree

    @property
    def interval(self) -> Interval:
        return self.basis.interval

    @property
    def magnitude(self) -> float:
        return float(np.abs(self.d).max())
