import os
from pathlib import Path
from dotenv import load_dotenv

load_dotenv()


class Quadrature:
    POINTS = int(os.getenv("FAD_QUADRATURE_POINTS", 20))
    NEWTON_TOL = float(os.getenv("FAD_NEWTON_TOL", 1e-15))
    NEWTON_MAX_ITER = int(os.getenv("FAD_NEWTON_MAX_ITER", 100))


class CaputoSeries:
    TOL = float(os.getenv("FAD_SERIES_TOL", 1e-14))
    MAX_TERMS = int(os.getenv("FAD_SERIES_MAX_TERMS", 200))


class ErrorGrid:
    # x_j = j / POINTS on the unit interval
    POINTS = int(os.getenv("FAD_ERROR_GRID_POINTS", 100))


class Tolerances:
    BOUNDARY = float(os.getenv("FAD_BOUNDARY_TOL", 1e-12))


OUTPUT_DIR = Path(os.getenv("FAD_OUTPUT_DIRECTORY", "results"))

LOG_DIR = Path(os.getenv("LOG_DIRECTORY", "logs"))
LOG_DIR.mkdir(exist_ok=True)
