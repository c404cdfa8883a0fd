"""
Gohberg-Semencul compressed inverses of Toeplitz matrices.

A representation stores two solve vectors and a scalar pivot; applying the
inverse costs four triangular Toeplitz products, i.e. O(n log n):

    pivot * T^-1 = Z(a1) Z(b1)^T - Z(a2) Z(b2)^T

Part (a) builds it from p = T^-1 e_1 and q = T^-1 e_n. Parts (b) and (c)
build it from the two boundary solves of the (n+1) x (n+1) extension and
invert the leading block T_n or the displaced block T_{1,0}.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Tuple, Union

import numpy as np

from ..config.settings import GsConfig
from . import dense_oracle
from .exceptions import DegeneratePivotError, NumericalInstabilityError, UsageError
from .structured_matrices import (
    FCirculantSpec, HankelSpec, HankelSide, ToeplitzSpec,
    hankel_toeplitz_convert, to_dense, triangular_matvec,
)

logger = logging.getLogger(__name__)


class GsPart(Enum):
    """Which extension block a part (b)/(c) representation inverts"""
    B = "leading"      # T_n, pivot v_0
    C = "displaced"    # T_{1,0}, pivot v_n


def _downshift(v: np.ndarray) -> np.ndarray:
    """Z v"""
    return np.concatenate([[0.0], v[:-1]])


@dataclass(frozen=True)
class GsInverseA:
    """p1 T^-1 = Z(p) Z(Jq)^T - Z(Zq) Z(ZJp)^T"""
    order: int
    p: np.ndarray = field(repr=False)
    q: np.ndarray = field(repr=False)
    p1: float

    @property
    def pivot(self) -> float:
        return self.p1

    @property
    def terms(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        p, q = self.p, self.q
        return p, q[::-1], _downshift(q), _downshift(p[::-1])


@dataclass(frozen=True)
class GsInverseBC:
    """
    Boundary solves of T_{n+1}: vhat = T_{n+1}^-1 e_1, what = T_{n+1}^-1 e_{n+1}.

    B: v_0 T_n^-1 = Z(v) Z(Jw')^T - Z(w) Z(Jv')^T
    C: v_n T_{1,0}^-1 = Z(w) Z(Jv')^T - Z(v) Z(Jw')^T
    """
    order: int
    vhat: np.ndarray = field(repr=False)
    what: np.ndarray = field(repr=False)
    which: GsPart

    @property
    def pivot(self) -> float:
        return float(self.vhat[0] if self.which is GsPart.B else self.vhat[self.order])

    @property
    def terms(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        n = self.order
        v, v_tail = self.vhat[:n], self.vhat[1:]
        w, w_tail = self.what[:n], self.what[1:]
        if self.which is GsPart.B:
            return v, w_tail[::-1], w, v_tail[::-1]
        return w, v_tail[::-1], v, w_tail[::-1]


GsInverse = Union[GsInverseA, GsInverseBC]


def _require_square(T: ToeplitzSpec, what: str):
    if not T.is_square:
        raise UsageError(f"{what} needs a square Toeplitz matrix, got {T.rows}x{T.cols}", error_code="NOT_SQUARE")


def _unit(n: int, index: int) -> np.ndarray:
    e = np.zeros(n)
    e[index] = 1.0
    return e


def _validate_probe(G: GsInverse, dense: np.ndarray, factors, kappa: float):
    """One random right-hand side: compressed apply against the dense solve"""
    rng = np.random.Generator(np.random.Philox(GsConfig.PROBE_SEED))
    x = rng.standard_normal(G.order)
    expected = dense_oracle.lu_solve(dense, x, factors=factors)
    got = apply_gs(G, x)
    error = np.linalg.norm(got - expected) / max(np.linalg.norm(expected), np.finfo(float).tiny)
    tolerance = GsConfig.PROBE_RTOL * max(kappa, 1.0)
    if not error <= tolerance:
        logger.warning(f"GS probe failed for n={G.order}: relative error {error:.3e} > {tolerance:.3e}")
        raise NumericalInstabilityError(
            f"Compressed inverse disagrees with dense solve (relative error {error:.3e})",
            error_code="GS_PROBE_FAILED",
            details={"error": float(error), "tolerance": float(tolerance)},
        )


def build_gs_a(T: ToeplitzSpec) -> GsInverseA:
    """
    Part (a) representation from two dense LU solves.

    Raises SingularityError for a numerically singular T and
    DegeneratePivotError when p1 is negligible (fall back to build_gs_bc).
    """
    _require_square(T, "build_gs_a")
    n = T.rows
    dense = to_dense(T)
    factors = dense_oracle.lu_factor_checked(dense)

    p = dense_oracle.lu_solve(dense, _unit(n, 0), factors=factors)
    q = dense_oracle.lu_solve(dense, _unit(n, n - 1), factors=factors)
    p1 = float(p[0])

    if abs(p1) <= GsConfig.DEGENERATE_PIVOT_RTOL * np.linalg.norm(p):
        raise DegeneratePivotError(
            f"p1 = {p1:.3e} is negligible; part (a) does not apply",
            error_code="DEGENERATE_P1",
            details={"p1": p1, "order": n},
        )

    G = GsInverseA(order=n, p=p, q=q, p1=p1)
    _validate_probe(G, dense, factors, dense_oracle.condition_estimate_one(dense, factors))
    return G


def build_gs_bc(T_ext: ToeplitzSpec, which: GsPart = GsPart.B) -> GsInverseBC:
    """Part (b) or (c) representation from the (n+1) x (n+1) extension"""
    _require_square(T_ext, "build_gs_bc")
    size = T_ext.rows
    if size < 2:
        raise UsageError("The extension must be at least 2x2", error_code="BAD_SHAPE")
    n = size - 1

    dense = to_dense(T_ext)
    factors = dense_oracle.lu_factor_checked(dense)
    vhat = dense_oracle.lu_solve(dense, _unit(size, 0), factors=factors)
    what = dense_oracle.lu_solve(dense, _unit(size, n), factors=factors)

    G = GsInverseBC(order=n, vhat=vhat, what=what, which=which)
    if abs(G.pivot) <= GsConfig.DEGENERATE_PIVOT_RTOL * np.linalg.norm(vhat):
        name = "v_0" if which is GsPart.B else "v_n"
        raise DegeneratePivotError(
            f"{name} = {G.pivot:.3e} is negligible; part ({which.name.lower()}) does not apply",
            error_code="DEGENERATE_V",
            details={"pivot": G.pivot, "order": n},
        )
    return G


def inverted_block(T_ext: ToeplitzSpec, which: GsPart) -> ToeplitzSpec:
    """The n x n matrix a part (b)/(c) representation of T_ext inverts"""
    n = T_ext.rows - 1
    if which is GsPart.B:
        return T_ext.leading_block(n)
    # T_{1,0} = (t_{i-j}), i = 1..n, j = 0..n-1: diagonals h = 2-n .. n
    return ToeplitzSpec(n, n, T_ext.diagonals[2:])


def apply_gs(G: GsInverse, x: np.ndarray) -> np.ndarray:
    """T^-1 x from four triangular Toeplitz products"""
    a1, b1, a2, b2 = G.terms
    first = triangular_matvec(a1, triangular_matvec(b1, x, transpose=True))
    second = triangular_matvec(a2, triangular_matvec(b2, x, transpose=True))
    return (first - second) / G.pivot


def apply_gs_transpose(G: GsInverse, x: np.ndarray) -> np.ndarray:
    """T^-T x: (Z(a) Z(b)^T)^T = Z(b) Z(a)^T"""
    a1, b1, a2, b2 = G.terms
    first = triangular_matvec(b1, triangular_matvec(a1, x, transpose=True))
    second = triangular_matvec(b2, triangular_matvec(a2, x, transpose=True))
    return (first - second) / G.pivot


def gs_to_dense(G: GsInverse) -> np.ndarray:
    """Dense reconstruction of the inverse from the formula"""
    n = G.order
    a1, b1, a2, b2 = G.terms
    Z = lambda v: to_dense(FCirculantSpec(n, v, 0.0))  # noqa: E731
    return (Z(a1) @ Z(b1).T - Z(a2) @ Z(b2).T) / G.pivot


def pivot_ratios(T: ToeplitzSpec) -> np.ndarray:
    """
    |det T_{h+1} / det T_h| for h = 1 .. n-1.

    These are the absolute diagonal pivots of unpivoted LU past the first,
    so no determinant is ever formed. DegenerateMinorError names the
    vanishing leading minor.
    """
    _require_square(T, "pivot_ratios")
    pivots = dense_oracle.unpivoted_lu_pivots(to_dense(T))
    return np.abs(pivots[1:])


def pivot_identity_check(T: ToeplitzSpec) -> dict:
    """
    p1 = det T_{n-1} / det T_n and v_0 = det T_n / det T_{n+1}.

    Both are checked on T itself: part (a) of T and part (b) with T as the
    extension of its leading block. The determinant ratio is the reciprocal
    of the last unpivoted LU pivot.
    """
    _require_square(T, "pivot_identity_check")
    size = T.rows
    if size < 2:
        raise UsageError("Need at least a 2x2 matrix", error_code="BAD_SHAPE")
    pivots = dense_oracle.unpivoted_lu_pivots(to_dense(T))

    # part (a) on T itself: p1 = det T_{n-1} / det T_n = 1 / last pivot
    G = build_gs_a(T)
    # part (b) on T as extension of its leading block: v_0 = 1 / last pivot
    B = build_gs_bc(T, GsPart.B)
    expected = 1.0 / pivots[-1]
    return {
        "p1": G.p1,
        "v0": B.pivot,
        "det_ratio": float(expected),
        "p1_relative_error": float(abs(G.p1 - expected) / abs(expected)),
        "v0_relative_error": float(abs(B.pivot - expected) / abs(expected)),
    }


def hankel_apply_inverse(H: HankelSpec, x: np.ndarray) -> np.ndarray:
    """H^-1 x = J T^-1 x for H = T J"""
    T, side = hankel_toeplitz_convert(H, HankelSide.RIGHT)
    G = build_gs_a(T)
    return apply_gs(G, np.asarray(x, dtype=float))[::-1]
