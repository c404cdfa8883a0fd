"""
Brute-force dense linear algebra: ground truth for tests and the solver
behind Gohberg-Semencul construction.

LU with partial pivoting comes from LAPACK through scipy.linalg; the
singular value oracle is a one-sided (Hestenes) Jacobi iteration with a
round-robin pair ordering so that each round rotates n/2 disjoint column
pairs at once.
"""

import logging
from functools import lru_cache
from typing import List, Tuple

import numpy as np
import scipy.linalg
from scipy.linalg import lapack

from ..config.settings import OracleConfig
from .exceptions import (
    ConvergenceError, DegenerateMinorError, ResourceError, SingularityError, UsageError,
)

logger = logging.getLogger(__name__)

# Type aliases
DenseMatrix = np.ndarray
LuFactors = Tuple[np.ndarray, np.ndarray]


def check_dense(A) -> DenseMatrix:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise UsageError(f"Expected a matrix, got shape {A.shape}", error_code="BAD_SHAPE")
    m, n = A.shape
    if m * n > OracleConfig.MAX_DENSE_ENTRIES or max(m, n) > OracleConfig.MAX_DENSE_SIDE:
        raise ResourceError(f"Dense {m}x{n} exceeds the oracle guard", error_code="DENSE_TOO_LARGE")
    if not np.all(np.isfinite(A)):
        raise UsageError("Matrix contains NaN or Inf", error_code="NON_FINITE")
    return A


def _check_square(A: DenseMatrix):
    if A.shape[0] != A.shape[1]:
        raise UsageError(f"Square matrix required, got {A.shape[0]}x{A.shape[1]}", error_code="NOT_SQUARE")


# LU

def lu_factor_checked(A) -> LuFactors:
    """Partial-pivoting LU; any |u_ii| below the singular pivot raises"""
    A = check_dense(A)
    _check_square(A)
    lu, piv = scipy.linalg.lu_factor(A, check_finite=False)
    smallest = float(np.min(np.abs(np.diag(lu)))) if A.size else 1.0
    if smallest < OracleConfig.SINGULAR_PIVOT:
        raise SingularityError(
            f"Matrix of order {A.shape[0]} is numerically singular (pivot {smallest:.3e})",
            error_code="SINGULAR",
            details={"pivot": smallest},
        )
    return lu, piv


def lu_solve(A, b, factors: LuFactors = None, transpose: bool = False) -> np.ndarray:
    """Solve A x = b (or A^T x = b)"""
    factors = factors or lu_factor_checked(A)
    b = np.asarray(b, dtype=float)
    if b.shape[0] != factors[0].shape[0]:
        raise UsageError(
            f"Right-hand side of length {b.shape[0]} does not match order {factors[0].shape[0]}",
            error_code="DIMENSION_MISMATCH",
        )
    return scipy.linalg.lu_solve(factors, b, trans=1 if transpose else 0, check_finite=False)


def dense_inverse(A, factors: LuFactors = None) -> DenseMatrix:
    """Inverse through n LU solves against the identity"""
    A = check_dense(A)
    _check_square(A)
    return lu_solve(A, np.eye(A.shape[0]), factors=factors)


def condition_estimate_one(A, factors: LuFactors = None) -> float:
    """LAPACK dgecon estimate of kappa_1 from an existing factorization"""
    A = check_dense(A)
    lu, _ = factors or lu_factor_checked(A)
    anorm = float(np.abs(A).sum(axis=0).max())
    rcond, info = lapack.dgecon(lu, anorm, norm="1")
    if info != 0 or rcond <= 0:
        return float("inf")
    return 1.0 / rcond


def log_abs_det(A, factors: LuFactors = None) -> float:
    lu, _ = factors or lu_factor_checked(A)
    return float(np.sum(np.log(np.abs(np.diag(lu)))))


def unpivoted_lu_pivots(A) -> np.ndarray:
    """
    Diagonal pivots of Gaussian elimination without row exchanges.

    pivot k equals det A_{k+1} / det A_k for the leading blocks, so a zero
    pivot pinpoints the first singular leading minor.
    """
    A = check_dense(A)
    _check_square(A)
    n = A.shape[0]
    work = A.copy()
    pivots = np.empty(n)
    threshold = OracleConfig.MINOR_PIVOT_RTOL * max(float(np.abs(A).max()), np.finfo(float).tiny)

    for k in range(n):
        pivot = work[k, k]
        if abs(pivot) <= threshold:
            raise DegenerateMinorError(
                f"Leading minor of order {k + 1} vanishes (pivot {pivot:.3e})",
                error_code="DEGENERATE_MINOR",
                details={"h": k, "order": k + 1, "pivot": float(pivot)},
            )
        pivots[k] = pivot
        if k + 1 < n:
            multipliers = work[k + 1:, k] / pivot
            work[k + 1:, k + 1:] -= np.outer(multipliers, work[k, k + 1:])

    return pivots


# Singular values

@lru_cache(maxsize=32)
def _round_robin(n: int) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Tournament schedule: every column pair exactly once per sweep"""
    players = list(range(n + (n % 2)))
    rounds = []
    for _ in range(len(players) - 1):
        half = len(players) // 2
        pairs = [(players[i], players[-1 - i]) for i in range(half)]
        pairs = [(min(p, q), max(p, q)) for p, q in pairs if p < n and q < n]
        if pairs:
            rounds.append((np.array([p for p, _ in pairs]), np.array([q for _, q in pairs])))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _jacobi_columns(W: np.ndarray, V: np.ndarray = None) -> Tuple[np.ndarray, int]:
    m, n = W.shape
    # A tolerance below the rounding floor of an m-long inner product never triggers
    tol = max(OracleConfig.JACOBI_TOL, m * np.finfo(float).eps)
    schedule = _round_robin(n)

    for sweep in range(1, OracleConfig.JACOBI_MAX_SWEEPS + 1):
        rotated = 0
        for P, Q in schedule:
            ap, aq = W[:, P], W[:, Q]
            alpha = np.einsum("ij,ij->j", ap, ap)
            beta = np.einsum("ij,ij->j", aq, aq)
            gamma = np.einsum("ij,ij->j", ap, aq)

            active = np.abs(gamma) > tol * np.sqrt(alpha * beta)
            if not np.any(active):
                continue
            rotated += int(active.sum())

            P, Q = P[active], Q[active]
            ap, aq = ap[:, active], aq[:, active]
            zeta = (beta[active] - alpha[active]) / (2.0 * gamma[active])
            t = np.where(zeta >= 0, 1.0, -1.0) / (np.abs(zeta) + np.sqrt(1.0 + zeta * zeta))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = c * t

            W[:, P] = c * ap - s * aq
            W[:, Q] = s * ap + c * aq
            if V is not None:
                vp, vq = V[:, P].copy(), V[:, Q].copy()
                V[:, P] = c * vp - s * vq
                V[:, Q] = s * vp + c * vq

        if rotated == 0:
            return W, sweep

    raise ConvergenceError(
        f"Jacobi SVD did not converge in {OracleConfig.JACOBI_MAX_SWEEPS} sweeps",
        error_code="JACOBI_NO_CONVERGENCE",
        details={"shape": [m, n]},
    )


def _prepare_svd(A) -> Tuple[np.ndarray, bool]:
    A = check_dense(A)
    m, n = A.shape
    if min(m, n) > OracleConfig.MAX_SVD_DIM:
        raise ResourceError(
            f"Jacobi SVD limited to min(m, n) <= {OracleConfig.MAX_SVD_DIM}, got {A.shape}",
            error_code="SVD_TOO_LARGE",
        )
    # Orthogonalize the shorter side's columns; sigma_j(A) = sigma_j(A^T)
    transposed = n > m
    return (A.T.copy() if transposed else A.copy()), transposed


def jacobi_svd(A) -> np.ndarray:
    """All singular values, descending"""
    W, _ = _prepare_svd(A)
    W, sweeps = _jacobi_columns(W)
    logger.debug(f"Jacobi SVD of {W.shape} converged in {sweeps} sweeps")
    return np.sort(np.linalg.norm(W, axis=0))[::-1]


def jacobi_svd_factors(A) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Full-factor variant: A = U diag(s) V^T with s descending"""
    W, transposed = _prepare_svd(A)
    V = np.eye(W.shape[1])
    W, _ = _jacobi_columns(W, V)

    s = np.linalg.norm(W, axis=0)
    order = np.argsort(s)[::-1]
    s, W, V = s[order], W[:, order], V[:, order]
    U = np.divide(W, s, out=np.zeros_like(W), where=s > 0)

    if transposed:
        return V, s, U
    return U, s, V


def singular_values(A, method: str = "jacobi") -> np.ndarray:
    """Descending singular values via the Jacobi oracle or LAPACK (Monte Carlo speed)"""
    if method == "jacobi":
        return jacobi_svd(A)
    if method == "lapack":
        return scipy.linalg.svdvals(check_dense(A), check_finite=False)
    raise UsageError(f"Unknown singular value method {method!r}", error_code="BAD_METHOD")


def dense_norms(A) -> Tuple[float, float, float]:
    """(1-norm, 2-norm, inf-norm); the 2-norm is the Jacobi sigma_1"""
    A = check_dense(A)
    if A.size == 0:
        return 0.0, 0.0, 0.0
    absolute = np.abs(A)
    return float(absolute.sum(axis=0).max()), float(jacobi_svd(A)[0]), float(absolute.sum(axis=1).max())
