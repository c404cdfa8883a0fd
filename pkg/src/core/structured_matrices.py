"""
Toeplitz, Hankel, f-circulant and triangular Toeplitz matrices.

Every class is stored by its defining vector only. Products run through the
DFT kernel in O((m+n) log(m+n)); the dense realization exists for the oracle
and for reproducibility dumps.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Tuple, Union

import numpy as np
import scipy.linalg

from ..config.settings import OracleConfig
from .dft_kernel import (
    create_plan, cyclic_convolve, dft_forward, dft_inverse, linear_convolve, next_power_of_two,
)
from .exceptions import ResourceError, UsageError, SingularityError

logger = logging.getLogger(__name__)

RealVector = np.ndarray


def _real_vector(values, name: str) -> np.ndarray:
    array = np.array(values, dtype=float).reshape(-1)
    if not np.all(np.isfinite(array)):
        raise UsageError(f"{name} contains NaN or Inf", error_code="NON_FINITE")
    array.setflags(write=False)
    return array


def _check_length(x: np.ndarray, expected: int, what: str) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != expected:
        raise UsageError(
            f"{what}: vector of shape {x.shape} does not match dimension {expected}",
            error_code="DIMENSION_MISMATCH",
            details={"expected": expected, "got": list(x.shape)},
        )
    return x


class HankelSide(Enum):
    """Which reflection turns the Toeplitz factor into the Hankel matrix"""
    RIGHT = "T*J"   # H = T J_n, columns reversed
    LEFT = "J*T"    # H = J_m T, rows reversed


@dataclass(frozen=True)
class ToeplitzSpec:
    """
    An m x n Toeplitz matrix T = (t_{i-j}).

    `diagonals` holds t_h for h = 1-n .. m-1 in ascending h, so entry (i, j)
    (zero based) is diagonals[i - j + n - 1].
    """
    rows: int
    cols: int
    diagonals: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise UsageError(f"Invalid Toeplitz shape {self.rows}x{self.cols}", error_code="BAD_SHAPE")
        diagonals = _real_vector(self.diagonals, "diagonals")
        if diagonals.shape[0] != self.rows + self.cols - 1:
            raise UsageError(
                f"Toeplitz {self.rows}x{self.cols} needs {self.rows + self.cols - 1} diagonals, got {diagonals.shape[0]}",
                error_code="BAD_LENGTH",
            )
        object.__setattr__(self, "diagonals", diagonals)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    @property
    def first_column(self) -> np.ndarray:
        return self.diagonals[self.cols - 1:]

    @property
    def first_row(self) -> np.ndarray:
        return self.diagonals[self.cols - 1::-1]

    def diagonal(self, h: int) -> float:
        """t_h for 1-n <= h <= m-1"""
        return float(self.diagonals[h + self.cols - 1])

    def transpose(self) -> "ToeplitzSpec":
        return ToeplitzSpec(self.cols, self.rows, self.diagonals[::-1])

    def leading_block(self, k: int) -> "ToeplitzSpec":
        if not self.is_square or not (1 <= k <= self.rows):
            raise UsageError(f"No leading {k}x{k} block in {self.rows}x{self.cols}", error_code="BAD_BLOCK")
        n = self.cols
        return ToeplitzSpec(k, k, self.diagonals[n - k:n + k - 1])

    @classmethod
    def from_column_row(cls, column, row) -> "ToeplitzSpec":
        column = np.asarray(column, dtype=float)
        row = np.asarray(row, dtype=float)
        if column[0] != row[0]:
            logger.warning("Toeplitz column and row disagree at (0, 0); column wins")
        return cls(column.shape[0], row.shape[0], np.concatenate([row[:0:-1], column]))

    @classmethod
    def from_dense(cls, matrix: np.ndarray) -> "ToeplitzSpec":
        """Re-extract the diagonal vector from the first row and column"""
        matrix = np.asarray(matrix, dtype=float)
        m, n = matrix.shape
        return cls(m, n, np.concatenate([matrix[0, ::-1], matrix[1:, 0]]))

    @classmethod
    def identity(cls, n: int) -> "ToeplitzSpec":
        diagonals = np.zeros(2 * n - 1)
        diagonals[n - 1] = 1.0
        return cls(n, n, diagonals)

    @classmethod
    def symmetric(cls, first_column) -> "ToeplitzSpec":
        column = np.asarray(first_column, dtype=float)
        return cls(column.shape[0], column.shape[0], np.concatenate([column[:0:-1], column]))


@dataclass(frozen=True)
class HankelSpec:
    """
    An m x n Hankel matrix H = (h_{i+j}).

    `antidiagonals` holds h_g for g = 2 .. m+n, so entry (i, j) (zero based)
    is antidiagonals[i + j].
    """
    rows: int
    cols: int
    antidiagonals: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise UsageError(f"Invalid Hankel shape {self.rows}x{self.cols}", error_code="BAD_SHAPE")
        values = _real_vector(self.antidiagonals, "antidiagonals")
        if values.shape[0] != self.rows + self.cols - 1:
            raise UsageError(
                f"Hankel {self.rows}x{self.cols} needs {self.rows + self.cols - 1} antidiagonals, got {values.shape[0]}",
                error_code="BAD_LENGTH",
            )
        object.__setattr__(self, "antidiagonals", values)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)


@dataclass(frozen=True)
class FCirculantSpec:
    """
    Z_f(v) = sum_i v_i Z_f^(i-1): first column v, corner scalar f.

    f = 1 is circulant, f = -1 skew circulant, f = 0 lower triangular Toeplitz.
    """
    order: int
    first_column: np.ndarray = field(repr=False)
    f: float = 1.0

    def __post_init__(self):
        column = _real_vector(self.first_column, "first_column")
        if column.shape[0] != self.order or self.order < 1:
            raise UsageError(
                f"f-circulant of order {self.order} needs a first column of that length, got {column.shape[0]}",
                error_code="BAD_LENGTH",
            )
        if not np.isfinite(self.f):
            raise UsageError("f must be finite", error_code="NON_FINITE")
        object.__setattr__(self, "first_column", column)
        object.__setattr__(self, "f", float(self.f))

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.order, self.order)

    def as_toeplitz(self) -> ToeplitzSpec:
        """t_h = v_h for h >= 0 and t_h = f v_{n+h} for h < 0"""
        v = self.first_column
        upper = self.f * v[1:]
        return ToeplitzSpec(self.order, self.order, np.concatenate([upper, v]))


StructuredSpec = Union[ToeplitzSpec, HankelSpec, FCirculantSpec]


# Dense realization

def _guard_size(m: int, n: int):
    if m * n > OracleConfig.MAX_DENSE_ENTRIES:
        raise ResourceError(
            f"Dense realization of {m}x{n} exceeds {OracleConfig.MAX_DENSE_ENTRIES} entries",
            error_code="DENSE_TOO_LARGE",
            details={"rows": m, "cols": n},
        )


def to_dense(spec: Any) -> np.ndarray:
    """Exact dense realization of any structured spec (dense arrays are copied)"""
    if isinstance(spec, np.ndarray):
        _guard_size(*spec.shape)
        return np.array(spec, dtype=float)

    _guard_size(*spec.shape)

    if isinstance(spec, ToeplitzSpec):
        return scipy.linalg.toeplitz(spec.first_column, spec.first_row)
    if isinstance(spec, HankelSpec):
        values = spec.antidiagonals
        return scipy.linalg.hankel(values[:spec.rows], values[spec.rows - 1:])
    if isinstance(spec, FCirculantSpec):
        return to_dense(spec.as_toeplitz())

    raise UsageError(f"Cannot realize {type(spec).__name__} densely", error_code="UNKNOWN_SPEC")


# Fast products

def toeplitz_matvec(T: ToeplitzSpec, x: RealVector) -> RealVector:
    """
    Tx through a circulant embedding of length 2^k >= m + n.

    The embedding's first column is (t_0, .., t_{m-1}, 0, .., 0, t_{1-n}, .., t_{-1}).
    """
    m, n = T.shape
    x = _check_length(x, n, "toeplitz_matvec")

    size = next_power_of_two(m + n)
    column = np.zeros(size)
    column[:m] = T.diagonals[n - 1:]
    if n > 1:
        column[size - n + 1:] = T.diagonals[:n - 1]

    padded = np.zeros(size)
    padded[:n] = x
    return cyclic_convolve(column, padded)[:m]


def triangular_matvec(v: RealVector, x: RealVector, transpose: bool = False) -> RealVector:
    """Z(v) x, or Z(v)^T x = J Z(v) J x when transpose is set"""
    v = np.asarray(v, dtype=float)
    x = _check_length(x, v.shape[0], "triangular_matvec")
    if transpose:
        return linear_convolve(v, x[::-1], v.shape[0])[::-1]
    return linear_convolve(v, x, v.shape[0])


def real_nth_root(g: float, n: int):
    """Real r with r^n = g, or None when g < 0 (refused, see DESIGN)"""
    if g > 0:
        return g ** (1.0 / n)
    return None


def fcirculant_matvec(C: FCirculantSpec, x: RealVector) -> RealVector:
    """
    Z_f(v) x.

    f = 1 is one cyclic convolution, f = 0 a truncated linear one. Other
    positive f use Z_g(v) = D^-1 Omega^-1 D(Omega D v) Omega D with
    D = diag(r^i), r^n = f. Negative f falls back to the Toeplitz embedding.
    """
    x = _check_length(x, C.order, "fcirculant_matvec")
    v = C.first_column

    if C.f == 1.0:
        return cyclic_convolve(v, x)
    if C.f == 0.0:
        return linear_convolve(v, x, C.order)

    root = real_nth_root(C.f, C.order)
    if root is None:
        logger.debug(f"No real {C.order}-th root of f={C.f}; using Toeplitz embedding")
        return toeplitz_matvec(C.as_toeplitz(), x)

    scale = root ** np.arange(C.order)
    return cyclic_convolve(scale * v, scale * x) / scale


def fcirculant_inverse(C: FCirculantSpec) -> FCirculantSpec:
    """
    Inverse of a nonsingular f-circulant, again f-circulant.

    Uses the diagonalization for f = 1 and f > 0; other f are solved densely
    for the first column.
    """
    n = C.order
    if C.f > 0:
        scale = C.f ** (np.arange(n) / n)
        plan = create_plan(n)
        spectrum = dft_forward(plan, scale * C.first_column)
        magnitude = np.abs(spectrum)
        if magnitude.min() <= n * np.finfo(float).eps * magnitude.max():
            raise SingularityError(f"f-circulant of order {n} is singular", error_code="SINGULAR_CIRCULANT")
        # Z_f(v)^-1 e_1 = D^-1 Omega^-1 (1 / Omega D v) since D e_1 = e_1
        column = dft_inverse(plan, 1.0 / spectrum).real / scale
        return FCirculantSpec(n, column, C.f)

    dense = to_dense(C)
    try:
        lu = scipy.linalg.lu_factor(dense, check_finite=True)
    except (ValueError, np.linalg.LinAlgError) as e:
        raise SingularityError(f"f-circulant factorization failed: {e}", error_code="SINGULAR_CIRCULANT")
    if np.min(np.abs(np.diag(lu[0]))) < OracleConfig.SINGULAR_PIVOT:
        raise SingularityError(f"f-circulant of order {n} is singular", error_code="SINGULAR_CIRCULANT")
    e1 = np.zeros(n)
    e1[0] = 1.0
    return FCirculantSpec(n, scipy.linalg.lu_solve(lu, e1), C.f)


# Conversions

def hankel_toeplitz_convert(H: HankelSpec, side: HankelSide = HankelSide.RIGHT) -> Tuple[ToeplitzSpec, HankelSide]:
    """
    Return T with H = T J (RIGHT, the default) or H = J T (LEFT).

    For H = T J_n the diagonal vector of T is the antidiagonal vector of H;
    for H = J_m T it is the same vector reversed.
    """
    if side is HankelSide.RIGHT:
        return ToeplitzSpec(H.rows, H.cols, H.antidiagonals), side
    return ToeplitzSpec(H.rows, H.cols, H.antidiagonals[::-1]), side


def toeplitz_to_hankel(T: ToeplitzSpec, side: HankelSide = HankelSide.RIGHT) -> HankelSpec:
    if side is HankelSide.RIGHT:
        return HankelSpec(T.rows, T.cols, T.diagonals)
    return HankelSpec(T.rows, T.cols, T.diagonals[::-1])


def split_toeplitz(T: ToeplitzSpec) -> Tuple[FCirculantSpec, FCirculantSpec]:
    """T = Z(t) + Z(t_-)^T with t = (t_0..t_{n-1}) and t_- = (0, t_{-1}, .., t_{1-n})"""
    if not T.is_square:
        raise UsageError(f"split_toeplitz needs a square matrix, got {T.rows}x{T.cols}", error_code="NOT_SQUARE")
    n = T.cols
    lower = T.diagonals[n - 1:]
    upper = np.concatenate([[0.0], T.diagonals[:n - 1][::-1]])
    return FCirculantSpec(n, lower, 0.0), FCirculantSpec(n, upper, 0.0)


# Serialization

def spec_to_dict(spec: Any) -> Dict[str, Any]:
    """JSON record {kind, m, n, f?, data} used in reproducibility dumps"""
    if isinstance(spec, ToeplitzSpec):
        return {"kind": "toeplitz", "m": spec.rows, "n": spec.cols, "data": spec.diagonals.tolist()}
    if isinstance(spec, HankelSpec):
        return {"kind": "hankel", "m": spec.rows, "n": spec.cols, "data": spec.antidiagonals.tolist()}
    if isinstance(spec, FCirculantSpec):
        return {"kind": "fcirculant", "m": spec.order, "n": spec.order, "f": spec.f,
                "data": spec.first_column.tolist()}
    if isinstance(spec, np.ndarray):
        return {"kind": "general", "m": spec.shape[0], "n": spec.shape[1], "data": spec.reshape(-1).tolist()}
    raise UsageError(f"Cannot serialize {type(spec).__name__}", error_code="UNKNOWN_SPEC")


def spec_from_dict(record: Dict[str, Any]) -> Any:
    kind = record.get("kind")
    m, n, data = int(record["m"]), int(record["n"]), record["data"]
    if kind == "toeplitz":
        return ToeplitzSpec(m, n, data)
    if kind == "hankel":
        return HankelSpec(m, n, data)
    if kind == "fcirculant":
        return FCirculantSpec(n, data, record.get("f", 1.0))
    if kind == "general":
        return np.asarray(data, dtype=float).reshape(m, n)
    raise UsageError(f"Unknown spec kind {kind!r}", error_code="UNKNOWN_SPEC")
