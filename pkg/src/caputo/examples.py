from math import factorial

import sympy as sp

from .models import ManufacturedSolution, UnknownExampleError

x, t = ManufacturedSolution.x, ManufacturedSolution.t


def _sine_series(m: int) -> float:
    if m % 2 == 0:
        return 0.0
    return (-1) ** ((m - 1) // 2) / factorial(m)


def _gaussian_series(m: int) -> float:
    # exp(-t^2) = sum_k (-1)^k t^{2k} / k!
    if m % 2:
        return 0.0
    return (-1) ** (m // 2) / factorial(m // 2)


def _decay_series(m: int) -> float:
    return (-1) ** m / factorial(m)


class BuiltinExamples:
    EX1 = ManufacturedSolution(
        name="ex1",
        spatial=x**2 * (1 - x),
        temporal=sp.sin(t),
        taylor=_sine_series,
        kappa1=0.1,
        kappa2=2.0,
        description="u = x^2 (1-x) sin t, homogeneous initial data",
    )
    EX2 = ManufacturedSolution(
        name="ex2",
        spatial=sp.sin(sp.pi * x),
        temporal=sp.exp(-t**2),
        taylor=_gaussian_series,
        kappa1=1.0,
        kappa2=1.0,
        description="u = sin(pi x) exp(-t^2), g = sin(pi x)",
    )
    EX3 = ManufacturedSolution(
        name="ex3",
        spatial=x**4 * (1 - x) ** 2,
        temporal=t**2,
        taylor=(0.0, 0.0, 1.0),
        kappa1=0.2,
        kappa2=1.5,
        description="u = x^4 (1-x)^2 t^2",
    )
    EX4 = ManufacturedSolution(
        name="ex4",
        spatial=x * sp.cos(sp.pi * x / 2),
        temporal=sp.exp(-t),
        taylor=_decay_series,
        kappa1=0.1,
        kappa2=2.0,
        description="u = x cos(pi x / 2) exp(-t)",
    )


def builtin_examples() -> list[ManufacturedSolution]:
    return [BuiltinExamples.EX1, BuiltinExamples.EX2, BuiltinExamples.EX3, BuiltinExamples.EX4]


def get_example(name: str) -> ManufacturedSolution:
    for solution in builtin_examples():
        if solution.name == name:
            return solution
    known = ", ".join(s.name for s in builtin_examples())
    raise UnknownExampleError(f"unknown problem {name!r}; choose one of {known}")
