"""
Norms, extremal singular values and condition numbers of structured matrices.

Everything works through fast products: exact 1- and inf-norms come from the
defining vector, sigma_max from power iteration on A^T A, sigma_min from the
same iteration on A^-T A^-1 with the inverse applied through a
Gohberg-Semencul representation, a DFT or an LU factorization.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, NamedTuple, Optional, Tuple

import numpy as np
from scipy.sparse.linalg import LinearOperator

from ..config.settings import ConditioningConfig, OracleConfig
from . import dense_oracle
from .dft_kernel import create_plan, dft_forward
from .exceptions import UsageError
from .gs_inversion import (
    GsInverse, GsInverseA, apply_gs, apply_gs_transpose, build_gs_a, gs_to_dense, pivot_ratios,
)
from .structured_matrices import (
    FCirculantSpec, HankelSpec, ToeplitzSpec,
    fcirculant_inverse, fcirculant_matvec, hankel_toeplitz_convert, to_dense, toeplitz_matvec,
)

logger = logging.getLogger(__name__)

Apply = Callable[[np.ndarray], np.ndarray]


class PowerEstimate(NamedTuple):
    value: float
    converged: bool
    iterations: int


@dataclass(frozen=True)
class SpectrumSummary:
    """Extremal singular values and kappa_2 = sigma_max / sigma_min"""
    sigma_max: float
    sigma_min: float
    kappa2: float
    iterations_used: Tuple[int, int] = (0, 0)
    converged: Tuple[bool, bool] = (True, True)

    @classmethod
    def from_extremes(cls, sigma_max: float, sigma_min: float,
                      iterations_used=(0, 0), converged=(True, True)) -> "SpectrumSummary":
        kappa = sigma_max / sigma_min if sigma_min > 0 else float("inf")
        return cls(float(sigma_max), float(sigma_min), float(kappa), tuple(iterations_used), tuple(converged))

    @property
    def all_converged(self) -> bool:
        return all(self.converged)


@dataclass(frozen=True)
class NormReport:
    one_norm: float
    inf_norm: float
    two_norm_estimate: float
    inv_one_norm_estimate: Optional[float] = None

    def consistent(self, rows: int, cols: int, tol: float = ConditioningConfig.NORM_REPORT_TOL) -> bool:
        """(1/sqrt m) ||A||_1 <= ||A||_2 <= sqrt n ||A||_1, and ||A||_2^2 <= ||A||_1 ||A||_inf"""
        two = self.two_norm_estimate * (1 + tol)
        return (
            self.one_norm / np.sqrt(rows) <= two
            and self.two_norm_estimate <= np.sqrt(cols) * self.one_norm * (1 + tol)
            and self.two_norm_estimate ** 2 <= self.one_norm * self.inf_norm * (1 + tol)
        )


@dataclass(frozen=True)
class CirculantSpectrum:
    singular_values: np.ndarray = field(repr=False)
    kappa: float
    singular: bool

    def summary(self) -> SpectrumSummary:
        s = self.singular_values
        return SpectrumSummary.from_extremes(s[0], 0.0 if self.singular else s[-1])


@dataclass(frozen=True)
class BracketReport:
    order: int
    f: float
    g_empirical: float
    g_claimed: float
    holds: bool
    sigma_f: np.ndarray = field(repr=False)
    sigma_1: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class HadamardReport:
    order: int
    t_bound: float
    log_geomean: float
    log_pivot_geomean: float
    log_bound: float
    log_abs_det: float
    log_hadamard_bound: float
    log_det_discrepancy: float
    holds: bool


@dataclass(frozen=True)
class NormSplitReport:
    scaled_inverse_norm: float
    one_norm_product: float
    two_norm_product: float
    holds: bool


# Operators

def _products(spec: Any) -> Tuple[Tuple[int, int], Apply, Apply]:
    """(shape, x -> A x, x -> A^T x) for any spec"""
    if isinstance(spec, ToeplitzSpec):
        transposed = spec.transpose()
        return spec.shape, lambda x: toeplitz_matvec(spec, x), lambda x: toeplitz_matvec(transposed, x)
    if isinstance(spec, HankelSpec):
        # H = T J and H^T = J T^T
        T, _ = hankel_toeplitz_convert(spec)
        transposed = T.transpose()
        return (spec.shape,
                lambda x: toeplitz_matvec(T, np.asarray(x, dtype=float)[::-1]),
                lambda x: toeplitz_matvec(transposed, x)[::-1])
    if isinstance(spec, FCirculantSpec):
        transposed = spec.as_toeplitz().transpose()
        return spec.shape, lambda x: fcirculant_matvec(spec, x), lambda x: toeplitz_matvec(transposed, x)
    if isinstance(spec, np.ndarray):
        A = dense_oracle.check_dense(spec)
        return A.shape, lambda x: A @ x, lambda x: A.T @ x
    raise UsageError(f"No fast products for {type(spec).__name__}", error_code="UNKNOWN_SPEC")


def as_operator(spec: Any) -> LinearOperator:
    """Matrix-free view of a spec with matvec and rmatvec"""
    shape, matvec, rmatvec = _products(spec)
    return LinearOperator(
        shape,
        matvec=lambda x: matvec(np.ravel(x)),
        rmatvec=lambda x: rmatvec(np.ravel(x)),
        dtype=float,
    )


def inverse_operator(spec: Any) -> Tuple[Apply, Apply]:
    """
    (x -> A^-1 x, x -> A^-T x) for a square spec.

    Toeplitz goes through part (a) of Gohberg-Semencul, Hankel through its
    Toeplitz factor, f-circulants through their f-circulant inverse and
    dense matrices through LU. Construction errors propagate.
    """
    if isinstance(spec, ToeplitzSpec):
        G = build_gs_a(spec)
        return lambda x: apply_gs(G, x), lambda x: apply_gs_transpose(G, x)
    if isinstance(spec, HankelSpec):
        # H^-1 = J T^-1 and H^-T = T^-T J
        T, _ = hankel_toeplitz_convert(spec)
        G = build_gs_a(T)
        return (lambda x: apply_gs(G, x)[::-1],
                lambda x: apply_gs_transpose(G, np.asarray(x, dtype=float)[::-1]))
    if isinstance(spec, FCirculantSpec):
        inverse = fcirculant_inverse(spec)
        shape, matvec, rmatvec = _products(inverse)
        return matvec, rmatvec
    if isinstance(spec, np.ndarray):
        A = dense_oracle.check_dense(spec)
        factors = dense_oracle.lu_factor_checked(A)
        return (lambda x: dense_oracle.lu_solve(A, x, factors=factors),
                lambda x: dense_oracle.lu_solve(A, x, factors=factors, transpose=True))
    raise UsageError(f"No inverse for {type(spec).__name__}", error_code="UNKNOWN_SPEC")


# Exact norms

def _toeplitz_sums(diagonals: np.ndarray, m: int, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Column and row absolute sums as windows over the prefix sums of |t_h|"""
    prefix = np.concatenate([[0.0], np.cumsum(np.abs(diagonals))])
    j = np.arange(n)
    columns = prefix[m + n - 1 - j] - prefix[n - 1 - j]
    i = np.arange(m)
    rows = prefix[i + n] - prefix[i]
    return columns, rows


def norms_exact(spec: Any) -> Tuple[float, float]:
    """(||A||_1, ||A||_inf) in O(m + n) from the defining vector"""
    if isinstance(spec, FCirculantSpec):
        spec = spec.as_toeplitz()
    if isinstance(spec, HankelSpec):
        # column reversal permutes the column sums and keeps the row sums
        spec, _ = hankel_toeplitz_convert(spec)
    if isinstance(spec, ToeplitzSpec):
        columns, rows = _toeplitz_sums(spec.diagonals, spec.rows, spec.cols)
        return float(columns.max()), float(rows.max())
    if isinstance(spec, np.ndarray):
        absolute = np.abs(dense_oracle.check_dense(spec))
        return float(absolute.sum(axis=0).max()), float(absolute.sum(axis=1).max())
    raise UsageError(f"No norms for {type(spec).__name__}", error_code="UNKNOWN_SPEC")


def frobenius_norm(spec: Any) -> float:
    """||A||_F from the defining vector, each t_h weighted by the length of its diagonal"""
    if isinstance(spec, FCirculantSpec):
        spec = spec.as_toeplitz()
    if isinstance(spec, HankelSpec):
        spec, _ = hankel_toeplitz_convert(spec)
    if isinstance(spec, ToeplitzSpec):
        m, n = spec.shape
        h = np.arange(1 - n, m)
        counts = np.minimum(m - 1, n - 1 + h) - np.maximum(0, h) + 1
        return float(np.sqrt(np.sum(counts * spec.diagonals ** 2)))
    if isinstance(spec, np.ndarray):
        return float(np.linalg.norm(dense_oracle.check_dense(spec)))
    raise UsageError(f"No norms for {type(spec).__name__}", error_code="UNKNOWN_SPEC")


# Power iterations

def _start_vector(n: int, rng: Optional[np.random.Generator]) -> np.ndarray:
    rng = rng if rng is not None else np.random.Generator(np.random.Philox(0))
    x = rng.standard_normal(n)
    norm = np.linalg.norm(x)
    if norm == 0:
        x = np.ones(n)
        norm = np.sqrt(n)
    return x / norm


def _power(forward: Apply, backward: Apply, n: int, max_iter: int, tol: float,
           rng: Optional[np.random.Generator]) -> PowerEstimate:
    """Largest singular value of the operator pair by power iteration on B^T B"""
    x = _start_vector(n, rng)
    previous = 0.0
    estimate = 0.0

    for iteration in range(1, max_iter + 1):
        y = forward(x)
        estimate = float(np.linalg.norm(y))
        z = backward(y)
        z_norm = np.linalg.norm(z)
        if z_norm == 0:
            return PowerEstimate(estimate, True, iteration)
        x = z / z_norm
        if iteration > 1 and abs(estimate - previous) <= tol * estimate:
            return PowerEstimate(estimate, True, iteration)
        previous = estimate

    logger.debug(f"Power iteration stopped at the cap of {max_iter} without converging")
    return PowerEstimate(estimate, False, max_iter)


def norm2_power(spec: Any, max_iter: int = ConditioningConfig.NORM_MAX_ITER,
                tol: float = ConditioningConfig.POWER_TOL,
                rng: Optional[np.random.Generator] = None) -> PowerEstimate:
    """
    sigma_1 by power iteration on A^T A from a seeded random start.

    The value ||A x|| for unit x never exceeds sigma_1, so the estimate is a
    lower bound within the convergence tolerance.
    """
    shape, matvec, rmatvec = _products(spec)
    return _power(matvec, rmatvec, shape[1], max_iter, tol, rng)


def sigma_min_from_inverse(apply_inverse: Apply, apply_inverse_transpose: Apply, n: int,
                           max_iter: int = ConditioningConfig.INV_MAX_ITER,
                           tol: float = ConditioningConfig.POWER_TOL,
                           rng: Optional[np.random.Generator] = None) -> PowerEstimate:
    """sigma_min = 1 / ||A^-1||_2 through power iteration on A^-T A^-1"""
    result = _power(apply_inverse, apply_inverse_transpose, n, max_iter, tol, rng)
    value = 1.0 / result.value if result.value > 0 else float("inf")
    return PowerEstimate(value, result.converged, result.iterations)


def sigma_min_inverse_power(T: ToeplitzSpec, gs: GsInverse,
                            max_iter: int = ConditioningConfig.INV_MAX_ITER,
                            tol: float = ConditioningConfig.POWER_TOL,
                            rng: Optional[np.random.Generator] = None,
                            gs_transpose: Optional[GsInverse] = None) -> PowerEstimate:
    """
    Inverse power iteration for a Toeplitz matrix with a GS representation.

    T^-T is applied from `gs_transpose` (a representation built for T^T)
    when given, otherwise by transposing the products of `gs`.
    """
    if not T.is_square or gs.order != T.rows:
        raise UsageError(f"GS representation of order {gs.order} does not fit {T.rows}x{T.cols}",
                         error_code="DIMENSION_MISMATCH")
    if gs_transpose is not None:
        backward = lambda x: apply_gs(gs_transpose, x)  # noqa: E731
    else:
        backward = lambda x: apply_gs_transpose(gs, x)  # noqa: E731
    return sigma_min_from_inverse(lambda x: apply_gs(gs, x), backward, T.rows, max_iter, tol, rng)


def inv_norm1_estimate(apply_inverse: Apply, apply_inverse_transpose: Apply, n: int,
                       max_sweeps: int = ConditioningConfig.HAGER_MAX_SWEEPS,
                       candidates: int = ConditioningConfig.HAGER_CANDIDATES) -> float:
    """
    Lower bound on ||A^-1||_1 by the Hager-Higham estimator.

    Each sweep solves for the `candidates` unvisited columns with the
    largest |z_j|, z = A^-T sign(y), instead of the single best one, and
    moves to the heaviest column found. Deterministic: starts from the
    uniform vector and finishes with the alternating-sign test vector.
    """
    if n == 1:
        return float(abs(apply_inverse(np.ones(1))[0]))

    def signs(y):
        return np.where(y >= 0, 1.0, -1.0)

    y = apply_inverse(np.full(n, 1.0 / n))
    estimate = float(np.abs(y).sum())
    xi = signs(y)
    z = apply_inverse_transpose(xi)
    visited = np.zeros(n, dtype=bool)

    for _ in range(2, max_sweeps + 1):
        order = np.argsort(-np.abs(z), kind="stable")
        picks = order[~visited[order]][:candidates]
        if picks.size == 0:
            break

        best_sum, best_y = -1.0, None
        for j in picks:
            e = np.zeros(n)
            e[j] = 1.0
            column = apply_inverse(e)
            visited[j] = True
            total = float(np.abs(column).sum())
            if total > best_sum:
                best_sum, best_y = total, column

        if best_sum <= estimate:
            break
        estimate = best_sum
        new_xi = signs(best_y)
        if np.array_equal(new_xi, xi):
            break
        xi = new_xi
        z = apply_inverse_transpose(xi)

    alternating = np.where(np.arange(n) % 2 == 0, 1.0, -1.0) * (1.0 + np.arange(n) / (n - 1))
    extra = 2.0 * float(np.abs(apply_inverse(alternating)).sum()) / (3.0 * n)
    return max(estimate, extra)


def norm_report(spec: Any, rng: Optional[np.random.Generator] = None,
                inverse: Optional[Tuple[Apply, Apply]] = None) -> NormReport:
    one, inf = norms_exact(spec)
    two = norm2_power(spec, rng=rng).value
    inv_one = None
    if inverse is not None:
        inv_one = inv_norm1_estimate(inverse[0], inverse[1], spec.shape[1])
    return NormReport(one, inf, two, inv_one)


# Spectra

def circulant_spectrum(C: FCirculantSpec) -> CirculantSpectrum:
    """Exact singular values |(Omega v)_i| of a circulant, descending"""
    if C.f != 1.0:
        raise UsageError(f"circulant_spectrum needs f = 1, got {C.f}", error_code="NOT_CIRCULANT")
    n = C.order
    u = np.abs(dft_forward(create_plan(n), C.first_column))
    values = np.sort(u)[::-1]
    largest, smallest = float(values[0]), float(values[-1])
    singular = largest == 0.0 or smallest <= n * np.finfo(float).eps * largest
    kappa = float("inf") if singular else largest / smallest
    return CirculantSpectrum(values, kappa, singular)


def estimate_spectrum(spec: Any, rng: Optional[np.random.Generator] = None,
                      svd_method: str = "lapack",
                      inverse: Optional[Tuple[Apply, Apply]] = None) -> SpectrumSummary:
    """
    sigma_max, sigma_min and kappa_2 of a square spec.

    Circulants are exact through the DFT. Up to the oracle threshold the
    dense singular values are used, above it the two power iterations.
    `inverse` is a prebuilt (A^-1, A^-T) pair from inverse_operator(spec).
    """
    if isinstance(spec, FCirculantSpec) and spec.f == 1.0:
        return circulant_spectrum(spec).summary()
    if isinstance(spec, HankelSpec):
        # kappa(H) = kappa(T) for H = T J; the inverse pair of H has the same singular values
        spec, _ = hankel_toeplitz_convert(spec)

    shape = spec.shape
    if shape[0] != shape[1]:
        raise UsageError(f"Square matrix required, got {shape[0]}x{shape[1]}", error_code="NOT_SQUARE")
    n = shape[0]

    if n <= OracleConfig.ORACLE_SVD_THRESHOLD:
        values = dense_oracle.singular_values(to_dense(spec), method=svd_method)
        return SpectrumSummary.from_extremes(values[0], values[-1])

    upper = norm2_power(spec, rng=rng)
    apply_inverse, apply_inverse_transpose = inverse if inverse is not None else inverse_operator(spec)
    lower = sigma_min_from_inverse(apply_inverse, apply_inverse_transpose, n, rng=rng)
    return SpectrumSummary.from_extremes(
        upper.value, lower.value,
        iterations_used=(upper.iterations, lower.iterations),
        converged=(upper.converged, lower.converged),
    )


def fcirculant_bracket_check(v, f: float, n: int) -> BracketReport:
    """
    Smallest g with sigma_j(Z_1(v)) / g <= sigma_j(Z_f(v)) <= g sigma_j(Z_1(v)).

    The result is compared with max(f^2, 1/f^2); a failed comparison is a
    finding and is logged, not raised.
    """
    if f == 0:
        raise UsageError("The bracket is not defined for f = 0", error_code="BAD_F")
    if n > ConditioningConfig.BRACKET_MAX_N:
        raise UsageError(f"Bracket check limited to n <= {ConditioningConfig.BRACKET_MAX_N}", error_code="TOO_LARGE")

    sigma_f = dense_oracle.jacobi_svd(to_dense(FCirculantSpec(n, v, f)))
    sigma_1 = circulant_spectrum(FCirculantSpec(n, v, 1.0)).singular_values

    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.maximum(sigma_f / sigma_1, sigma_1 / sigma_f)
    both_zero = (sigma_f == 0) & (sigma_1 == 0)
    ratios = np.where(both_zero, 1.0, ratios)
    ratios = np.where(np.isnan(ratios), np.inf, ratios)

    g_empirical = float(ratios.max())
    g_claimed = max(f * f, 1.0 / (f * f))
    holds = g_empirical <= g_claimed * (1 + 1e-10)
    if not holds:
        logger.info(f"Bracket finding: n={n}, f={f}: empirical g {g_empirical:.4g} exceeds max(f^2, 1/f^2) = {g_claimed:.4g}")
    return BracketReport(n, float(f), g_empirical, g_claimed, holds, sigma_f, sigma_1)


def hadamard_geomean_check(T: ToeplitzSpec, t_bound: float) -> HadamardReport:
    """
    Geometric mean of the leading-minor ratios against k^((1 + 1/(k-1))/2) t.

    The bound takes T_1 = (t), so the mean checked is (|det T_k| / t)^(1/(k-1));
    the raw pivot mean (|det T_k| / |t_0|)^(1/(k-1)) is reported next to it.
    Hadamard's |det T_k| <= k^(k/2) t^k is checked as well. All in log space.
    """
    if not T.is_square or T.rows < 2:
        raise UsageError("Need a square Toeplitz matrix of order at least 2", error_code="BAD_SHAPE")
    largest = float(np.abs(T.diagonals).max())
    if t_bound <= 0 or largest > t_bound * (1 + 1e-12):
        raise UsageError(f"Entries up to {largest:.6g} exceed t = {t_bound:.6g}", error_code="BAD_BOUND")

    k = T.rows
    ratios = pivot_ratios(T)
    log_t0 = np.log(abs(T.diagonal(0)))
    log_abs_det = log_t0 + float(np.sum(np.log(ratios)))
    log_t = np.log(t_bound)

    log_geomean = (log_abs_det - log_t) / (k - 1)
    log_pivot_geomean = float(np.mean(np.log(ratios)))
    log_bound = 0.5 * (1 + 1 / (k - 1)) * np.log(k) + log_t
    log_hadamard = 0.5 * k * np.log(k) + k * log_t

    discrepancy = abs(log_abs_det - dense_oracle.log_abs_det(to_dense(T)))
    slack = 1e-10 * max(1.0, abs(log_bound))
    holds = (
        log_geomean <= log_bound + slack
        and log_abs_det <= log_hadamard + 1e-10 * max(1.0, abs(log_hadamard))
        and discrepancy <= 1e-8 * max(1.0, abs(log_abs_det))
    )
    return HadamardReport(k, float(t_bound), float(log_geomean), log_pivot_geomean, float(log_bound),
                          float(log_abs_det), float(log_hadamard), float(discrepancy), bool(holds))


def gs_norm_split_check(G: GsInverseA, method: str = "jacobi") -> NormSplitReport:
    """||p1 T^-1|| <= 2 ||p||_1 ||q||_1 <= 2n ||p|| ||q||"""
    scaled = G.p1 * gs_to_dense(G)
    lhs = float(dense_oracle.singular_values(scaled, method=method)[0])
    middle = 2.0 * float(np.abs(G.p).sum() * np.abs(G.q).sum())
    rhs = 2.0 * G.order * float(np.linalg.norm(G.p) * np.linalg.norm(G.q))
    tol = 1 + 1e-10
    return NormSplitReport(lhs, middle, rhs, lhs <= middle * tol and middle <= rhs * tol)
