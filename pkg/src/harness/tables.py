"""CSV output: one header row, comma separated, floats as %.6e."""
import csv
import logging
from pathlib import Path
from typing import Any, Iterable, List

import numpy as np
from pydantic import BaseModel

from ..opmatrix import BandedMatrix
from .models import ConditionRow, ErrorReport, RateTable

logger = logging.getLogger(__name__)


def format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.6e}"
    return str(value)


def parse_value(text: str) -> Any:
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


def _flatten(row: BaseModel) -> dict:
    record = {}
    for key, value in row.model_dump().items():
        if isinstance(value, dict):
            record.update({k: v for k, v in value.items() if k not in record})
        else:
            record[key] = value
    return record


def records(rows: Iterable[BaseModel] | RateTable) -> List[dict]:
    if isinstance(rows, RateTable):
        return [
            {"mode": rows.mode, "metric": rows.metric, **_flatten(row)}
            for row in rows.rows
        ]
    return [_flatten(row) for row in rows]


def write_table(rows: List[dict] | Iterable[BaseModel] | RateTable, path: Path) -> Path:
    if isinstance(rows, RateTable) or (rows and isinstance(next(iter(rows)), BaseModel)):
        rows = records(rows)
    rows = list(rows)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = list(rows[0].keys()) if rows else []
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(row.get(key)) for key in header])
    logger.info(f"Wrote {len(rows)} rows to {path}")
    return path


def read_table(path: Path) -> List[dict]:
    with Path(path).open(newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        return [{key: parse_value(value) for key, value in row.items()} for row in reader]


def matrix_triples(matrix: BandedMatrix) -> List[dict]:
    """Stored nonzero entries as (row, col, value) records."""
    dense = matrix.to_dense()
    return [
        {"row": int(i), "col": int(j), "value": dense[i, j]}
        for i, j in zip(*np.nonzero(dense != 0))
    ]


def format_dense(matrix: BandedMatrix) -> str:
    dense = matrix.to_dense()
    if dense.dtype == object:
        width = max(len(str(v)) for v in dense.flat)
        return "\n".join(" ".join(str(v).rjust(width) for v in row) for row in dense)
    return np.array2string(dense, max_line_width=200, precision=6)


def summarize(report: ErrorReport) -> str:
    return (
        f"{report.problem}: alpha={report.alpha} N={report.N} M={report.M} "
        f"L_inf={report.l_inf:.3e} L_2={report.l_2:.3e} L_2(table)={report.l_2_table:.3e} "
        f"H1w={report.h1w:.3e} ({report.runtime:.2f}s)"
    )


def summarize_condition(row: ConditionRow) -> str:
    if row.status != "ok":
        return f"N={row.N} kappa=({row.kappa1}, {row.kappa2}): singular"
    return f"N={row.N} kappa=({row.kappa1}, {row.kappa2}): C_inf={row.cond:.3f} R_inf={row.ratio:.3e}"
