import argparse
import asyncio
import logging
import sys
from pathlib import Path
from typing import List, Optional

from .bernstein import DegreeError
from .caputo import CaputoSeriesError, TimeGrid, get_example
from .harness import PRESETS, ConditionRow, conditioning_study, error_norms, reproduce, spatial_sweep, temporal_sweep
from .harness.properties import verify
from .harness.tables import format_dense, matrix_triples, summarize, summarize_condition, write_table
from .linalg import SingularMatrixError
from .logging_config import setup_logging
from .opmatrix import build_integer_derivative_matrix
from .settings import OUTPUT_DIR
from .solver import AssemblyError, ProblemSpec, solve

logger = logging.getLogger(__name__)

# Exit status 2; every argument error in the package subclasses ValueError
HANDLED_ERRORS = (ValueError, CaputoSeriesError, SingularMatrixError, AssemblyError)

TIME_STEPS = [25, 50, 100, 200, 400]
SPACE_DEGREES = [4, 6, 8, 10, 12, 14]


def _output_path(out: Optional[str], default: str) -> Path:
    """Bare file names land in OUTPUT_DIR; anything with a directory is kept as given."""
    path = Path(out or default)
    return OUTPUT_DIR / path if path.parent == Path(".") else path


def _int_list(text: str) -> List[int]:
    try:
        return [int(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}")


def _problem(args) -> ProblemSpec:
    return ProblemSpec.from_manufactured(
        get_example(args.problem), args.alpha, T=args.T, kappa1=args.kappa1, kappa2=args.kappa2,
    )


# -------------------------------------------------------------------------
# Subcommands
# -------------------------------------------------------------------------

def run_solve(args) -> int:
    spec = _problem(args)
    history = solve(spec, args.N, TimeGrid(M=args.M, T=args.T))
    report = error_norms(spec.exact, history)
    print(summarize(report))
    write_table([report], _output_path(args.out, f"{spec.name}_alpha{spec.alpha}_N{args.N}_M{args.M}.csv"))
    if args.history:
        history.to_csv(_output_path(args.history, "history.csv"))
    return 0


def run_sweep(args) -> int:
    spec = _problem(args)
    values = args.list or (TIME_STEPS if args.mode == "time" else SPACE_DEGREES)
    if args.mode == "time":
        table = asyncio.run(temporal_sweep(spec, args.N, values, metric=args.metric or "l_inf"))
    else:
        table = asyncio.run(spatial_sweep(spec, args.M, values, metric=args.metric or "h1w"))
    for row in table.rows:
        rate = "-" if row.rate is None else f"{row.rate:.3f}"
        print(f"{args.mode} {row.resolution:g}: {table.metric}={row.error:.3e} rate={rate}")
    write_table(table, _output_path(args.out, f"{spec.name}_{args.mode}_sweep.csv"))
    return 0


def run_cond(args) -> int:
    if args.Nmin < 2 or args.Nmax < args.Nmin:
        raise ValueError(f"need 2 <= Nmin <= Nmax, got {args.Nmin}..{args.Nmax}")
    rows = conditioning_study(args.alpha, args.tau, [(args.kappa1, args.kappa2)], range(args.Nmin, args.Nmax + 1))
    for row in rows:
        print(summarize_condition(row))
    write_table(rows, _output_path(args.out, "conditioning.csv"))
    return 0


def run_matrices(args) -> int:
    """(b-a)^p D_p on [0, 1] in exact integers, or its interior block."""
    matrix = build_integer_derivative_matrix(args.N, args.p)
    label = f"D_{args.p}, N={args.N}"
    if args.interior:
        if args.N < 2:
            raise DegreeError(f"interior matrices need N >= 2, got N={args.N}")
        matrix = matrix.submatrix(1, args.N)
        label = f"interior {label}"
    print(label)
    print(format_dense(matrix))
    suffix = "_interior" if args.interior else ""
    write_table(matrix_triples(matrix), _output_path(args.out, f"D{args.p}_N{args.N}{suffix}.csv"))
    return 0


def run_verify(args) -> int:
    report = verify(seed=args.seed, filter=args.filter)
    for result in report.results:
        status = "PASS" if result.passed else "FAIL"
        print(f"{status}  {result.name:<24} defect={result.defect:.3e}  {result.detail}")
    print(f"{len(report.results) - len(report.failures)}/{len(report.results)} properties passed (seed {report.seed})")
    return 0 if report.passed else 1


def run_reproduce(args) -> int:
    tables = asyncio.run(reproduce(args.table))
    directory = Path(args.out) if args.out else OUTPUT_DIR
    for name, rows in tables.items():
        if isinstance(rows, list) and rows and isinstance(rows[0], ConditionRow):
            for row in rows:
                print(summarize_condition(row))
        elif isinstance(rows, list):
            for report in rows:
                print(summarize(report))
        else:
            for row in rows.rows:
                rate = "-" if row.rate is None else f"{row.rate:.3f}"
                print(f"{name} {rows.mode} {row.resolution:g}: {rows.metric}={row.error:.3e} rate={rate}")
        write_table(rows, directory / f"{name}.csv")
    return 0


# -------------------------------------------------------------------------
# Parser
# -------------------------------------------------------------------------

def _add_problem_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--problem", default="ex1", help="built-in example: ex1, ex2, ex3 or ex4")
    parser.add_argument("--alpha", type=float, default=0.5, help="fractional order in (0, 1)")
    parser.add_argument("--kappa1", type=float, default=None, help="dispersion coefficient (example default)")
    parser.add_argument("--kappa2", type=float, default=None, help="advection coefficient (example default)")
    parser.add_argument("--T", type=float, default=1.0, help="final time")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    common.add_argument("--out", default=None, help="output CSV path (bare names go to the output directory)")

    parser = argparse.ArgumentParser(
        prog="bernstein-fad",
        description="Bernstein operational matrices and an L1/Petrov-Galerkin solver "
                    "for the time-fractional advection-dispersion equation.",
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="debug output on the console")
    commands = parser.add_subparsers(dest="command", required=True)

    solve_parser = commands.add_parser("solve", parents=[common], help="solve one example and report errors")
    _add_problem_arguments(solve_parser)
    solve_parser.add_argument("--N", type=int, default=4, help="polynomial degree")
    solve_parser.add_argument("--M", type=int, default=10, help="number of time steps")
    solve_parser.add_argument("--history", default=None, help="also write the coefficient history CSV")
    solve_parser.set_defaults(handler=run_solve)

    sweep_parser = commands.add_parser("sweep", parents=[common], help="convergence sweep in tau or in N")
    _add_problem_arguments(sweep_parser)
    sweep_parser.add_argument("--mode", choices=("time", "space"), default="time")
    sweep_parser.add_argument("--list", type=_int_list, default=None,
                              help="comma separated M values (time) or degrees N (space)")
    sweep_parser.add_argument("--N", type=int, default=14, help="fixed degree for a time sweep")
    sweep_parser.add_argument("--M", type=int, default=400, help="fixed step count for a space sweep")
    sweep_parser.add_argument("--metric", choices=("l_inf", "l_2", "l_2_table", "h1w"), default=None)
    sweep_parser.set_defaults(handler=run_sweep)

    cond_parser = commands.add_parser("cond", parents=[common], help="condition numbers of the operator matrix")
    cond_parser.add_argument("--alpha", type=float, default=0.5)
    cond_parser.add_argument("--tau", type=float, default=1 / 40)
    cond_parser.add_argument("--kappa1", type=float, default=0.1)
    cond_parser.add_argument("--kappa2", type=float, default=2.0)
    cond_parser.add_argument("--Nmin", type=int, default=4)
    cond_parser.add_argument("--Nmax", type=int, default=11)
    cond_parser.set_defaults(handler=run_cond)

    matrices_parser = commands.add_parser("matrices", parents=[common], help="dump a derivative matrix")
    matrices_parser.add_argument("--N", type=int, default=4)
    matrices_parser.add_argument("--p", type=int, default=1)
    matrices_parser.add_argument("--interior", action="store_true", help="drop the first and last rows and columns")
    matrices_parser.set_defaults(handler=run_matrices)

    verify_parser = commands.add_parser("verify", parents=[common], help="run the property suite")
    verify_parser.add_argument("--filter", default=None, help="only properties whose name contains this")
    verify_parser.set_defaults(handler=run_verify)

    reproduce_parser = commands.add_parser("reproduce", parents=[common], help="rerun a reference parameter set")
    reproduce_parser.add_argument("--table", choices=sorted(PRESETS), required=True)
    reproduce_parser.set_defaults(handler=run_reproduce)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose)
    try:
        return args.handler(args)
    except HANDLED_ERRORS as e:
        logger.error(f"{args.command} failed: {e}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
