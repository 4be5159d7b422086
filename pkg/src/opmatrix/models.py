from dataclasses import dataclass

import numpy as np


class ShapeError(ValueError):
    """Raised when matrix and vector dimensions or bandwidths disagree."""


@dataclass(frozen=True, eq=False)
class BandedMatrix:
    """Rectangular matrix stored by diagonals.

    Entry (i, j) lives at ab[upper_bw + i - j, j] (the LAPACK general band
    layout); positions of ab that fall outside the matrix hold zero.
    """
    n_rows: int
    n_cols: int
    lower_bw: int
    upper_bw: int
    ab: np.ndarray

    def __post_init__(self):
        expected = (self.lower_bw + self.upper_bw + 1, self.n_cols)
        if self.ab.shape != expected:
            raise ShapeError(f"band storage has shape {self.ab.shape}, expected {expected}")

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int, lower_bw: int, upper_bw: int, dtype=float):
        ab = np.zeros((lower_bw + upper_bw + 1, n_cols), dtype=dtype)
        return cls(n_rows, n_cols, lower_bw, upper_bw, ab)

    @classmethod
    def identity(cls, n: int) -> "BandedMatrix":
        return cls(n, n, 0, 0, np.ones((1, n)))

    @classmethod
    def from_dense(cls, dense, lower_bw: int | None = None, upper_bw: int | None = None):
        dense = np.asarray(dense)
        n_rows, n_cols = dense.shape
        lower_bw = max(n_rows - 1, 0) if lower_bw is None else lower_bw
        upper_bw = max(n_cols - 1, 0) if upper_bw is None else upper_bw
        matrix = cls.zeros(n_rows, n_cols, lower_bw, upper_bw, dtype=dense.dtype)
        for i in range(n_rows):
            for j in range(n_cols):
                if -upper_bw <= i - j <= lower_bw:
                    matrix.ab[upper_bw + i - j, j] = dense[i, j]
                elif dense[i, j] != 0:
                    raise ShapeError(f"entry ({i}, {j}) lies outside bandwidths ({lower_bw}, {upper_bw})")
        return matrix

    @property
    def shape(self) -> tuple[int, int]:
        return self.n_rows, self.n_cols

    def _stored(self) -> tuple[np.ndarray, np.ndarray]:
        band = np.arange(self.ab.shape[0])[:, None]
        cols = np.arange(self.n_cols)[None, :]
        rows = cols + band - self.upper_bw
        valid = (rows >= 0) & (rows < self.n_rows)
        return valid, rows

    def __getitem__(self, index: tuple[int, int]):
        i, j = index
        if not (0 <= i < self.n_rows and 0 <= j < self.n_cols):
            raise IndexError(f"entry ({i}, {j}) outside {self.shape}")
        if -self.upper_bw <= i - j <= self.lower_bw:
            return self.ab[self.upper_bw + i - j, j]
        return self.ab.dtype.type(0) if self.ab.dtype != object else 0

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.shape, dtype=self.ab.dtype)
        valid, rows = self._stored()
        band, cols = np.nonzero(valid)
        dense[rows[band, cols], cols] = self.ab[band, cols]
        return dense

    def matvec(self, v: np.ndarray) -> np.ndarray:
        result = np.zeros(self.n_rows, dtype=np.result_type(self.ab, v))
        for band in range(self.ab.shape[0]):
            offset = band - self.upper_bw
            lo = max(0, -offset)
            hi = min(self.n_cols, self.n_rows - offset)
            if lo < hi:
                result[lo + offset:hi + offset] += self.ab[band, lo:hi] * v[lo:hi]
        return result

    def transpose(self) -> "BandedMatrix":
        return type(self).from_dense(self.to_dense().T, self.upper_bw, self.lower_bw)

    @property
    def T(self) -> "BandedMatrix":
        return self.transpose()

    def scaled(self, c: float) -> "BandedMatrix":
        return BandedMatrix(self.n_rows, self.n_cols, self.lower_bw, self.upper_bw, self.ab * c)

    def submatrix(self, lo: int, hi: int) -> "BandedMatrix":
        """Rows and columns lo..hi-1, keeping the bandwidths."""
        if not (0 <= lo < hi <= min(self.n_rows, self.n_cols)):
            raise ShapeError(f"cannot slice {lo}:{hi} from a {self.shape} matrix")
        n = hi - lo
        sliced = type(self)(n, n, self.lower_bw, self.upper_bw, self.ab[:, lo:hi].copy())
        valid, _ = sliced._stored()
        sliced.ab[~valid] = 0
        return sliced

    def row_abs_sums(self) -> np.ndarray:
        ones = np.ones(self.n_cols, dtype=self.ab.dtype)
        magnitudes = type(self)(self.n_rows, self.n_cols, self.lower_bw, self.upper_bw, np.abs(self.ab))
        return magnitudes.matvec(ones)

    def inf_norm(self):
        return max(self.row_abs_sums())

    @staticmethod
    def combine(terms: list[tuple[float, "BandedMatrix"]]) -> "BandedMatrix":
        """sum_k c_k M_k over equally shaped matrices."""
        shapes = {matrix.shape for _, matrix in terms}
        if len(shapes) != 1:
            raise ShapeError(f"cannot combine matrices of shapes {sorted(shapes)}")
        (n_rows, n_cols), = shapes
        lower = max(matrix.lower_bw for _, matrix in terms)
        upper = max(matrix.upper_bw for _, matrix in terms)
        total = BandedMatrix.zeros(n_rows, n_cols, lower, upper)
        for c, matrix in terms:
            shift = upper - matrix.upper_bw
            total.ab[shift:shift + matrix.ab.shape[0]] += c * matrix.ab
        return total


@dataclass(frozen=True, eq=False)
class IntegerBandedMatrix(BandedMatrix):
    """BandedMatrix holding exact Python ints (object dtype)."""

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int, lower_bw: int, upper_bw: int, dtype=object):
        return super().zeros(n_rows, n_cols, lower_bw, upper_bw, dtype=object)

    def to_float(self, scale: float = 1.0) -> BandedMatrix:
        return BandedMatrix(
            self.n_rows, self.n_cols, self.lower_bw, self.upper_bw,
            self.ab.astype(float) * scale,
        )
