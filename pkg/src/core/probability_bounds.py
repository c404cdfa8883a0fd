"""
Closed-form cdfs and cdf bounds for random structured matrices.

Each evaluator returns a BoundValue: the raw formula value, the value
clamped to [0, 1] and a vacuous flag set whenever the raw value leaves that
interval. Bound names in BOUNDS are the stable identifiers of the command line.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, Mapping

import numpy as np
from scipy.special import gammaln

from .exceptions import ConvergenceError, DomainError, UsageError

logger = logging.getLogger(__name__)

_SERIES_MAX_TERMS = 2000
_GAMMA_EPS = 1e-15
_TINY = 1e-300


class BoundDirection(Enum):
    """UPPER bounds the cdf from above, LOWER from below"""
    UPPER = "upper"
    LOWER = "lower"


@dataclass(frozen=True)
class BoundValue:
    value: float
    raw: float
    vacuous: bool

    @classmethod
    def of(cls, raw: float) -> "BoundValue":
        raw = float(raw)
        return cls(min(1.0, max(0.0, raw)), raw, not (0.0 <= raw <= 1.0))


@dataclass(frozen=True)
class CdfBound:
    name: str
    direction: BoundDirection
    evaluate: Callable[[float, Mapping[str, float]], BoundValue]
    description: str = ""


# Regularized incomplete gamma

def _gamma_series(a: float, x: float) -> float:
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_SERIES_MAX_TERMS):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _GAMMA_EPS:
            return total * math.exp(-x + a * math.log(x) - gammaln(a))
    raise ConvergenceError(f"Incomplete gamma series did not converge for a={a}, x={x}", error_code="GAMMA_SERIES")


def _gamma_continued_fraction(a: float, x: float) -> float:
    """Q(a, x) by the modified Lentz method"""
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _SERIES_MAX_TERMS + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _GAMMA_EPS:
            return math.exp(-x + a * math.log(x) - gammaln(a)) * h
    raise ConvergenceError(f"Incomplete gamma fraction did not converge for a={a}, x={x}", error_code="GAMMA_FRACTION")


def regularized_gamma_p(a: float, x: float) -> float:
    """P(a, x): series below x = a + 1, continued fraction above"""
    if a <= 0:
        raise UsageError(f"Shape a must be positive, got {a}", error_code="BAD_PARAMETER")
    if x < 0:
        raise UsageError(f"Argument x must be non-negative, got {x}", error_code="BAD_PARAMETER")
    if x == 0:
        return 0.0
    if x < a + 1.0:
        return min(1.0, _gamma_series(a, x))
    return max(0.0, 1.0 - _gamma_continued_fraction(a, x))


def chi_cdf(n: int, y: float, sigma: float = 1.0, mu: float = 0.0) -> float:
    """
    cdf of the norm of an n-vector of i.i.d. N(mu, sigma^2) entries.

    Only the central case is defined here; mu != 0 raises DomainError.
    """
    if n < 1:
        raise UsageError(f"Degrees must be at least 1, got {n}", error_code="BAD_PARAMETER")
    if y < 0:
        raise UsageError(f"chi_cdf needs y >= 0, got {y}", error_code="BAD_PARAMETER")
    if mu != 0:
        raise DomainError("The noncentral chi cdf (mu != 0) is not supported", error_code="NONCENTRAL")
    if sigma <= 0:
        raise UsageError(f"sigma must be positive, got {sigma}", error_code="BAD_PARAMETER")
    scaled = y / sigma
    return regularized_gamma_p(n / 2.0, 0.5 * scaled * scaled)


# Bounds

def _check_nonnegative(y: float):
    if y < 0:
        raise UsageError(f"Bounds are evaluated at y >= 0, got {y}", error_code="BAD_PARAMETER")


def _check_sigma(sigma: float):
    if not sigma > 0:
        raise UsageError(f"sigma must be positive, got {sigma}", error_code="BAD_PARAMETER")


def bound_sv_general(l: int, sigma: float, y: float) -> BoundValue:
    """Upper bound 2.35 sqrt(l) y / sigma on the cdf of sigma_l of a Gaussian matrix"""
    _check_nonnegative(y)
    _check_sigma(sigma)
    return BoundValue.of(2.35 * math.sqrt(l) * y / sigma)


def bound_norm_general(h: int, sigma: float, z: float) -> BoundValue:
    """Lower bound 1 - exp(-(z - 2 sigma sqrt h)^2 / (2 sigma^2)) for z >= 2 sigma sqrt h"""
    _check_sigma(sigma)
    threshold = 2.0 * sigma * math.sqrt(h)
    if z < threshold * (1 - 1e-15):
        raise DomainError(f"Norm bound is stated for z >= {threshold:.6g}, got {z}", error_code="OUT_OF_DOMAIN",
                          details={"threshold": threshold})
    gap = max(0.0, z - threshold)
    return BoundValue.of(1.0 - math.exp(-gap * gap / (2.0 * sigma * sigma)))


def bound_kappa_general(n: int, sigma: float, y: float) -> BoundValue:
    """Lower bound 1 - (14.1 + 4.7 sqrt(2 ln y / n)) n / (y sigma); vacuous when negative"""
    if not (0 < sigma <= 1):
        raise UsageError(f"kappa bound needs 0 < sigma <= 1, got {sigma}", error_code="BAD_PARAMETER")
    if y < 1:
        raise UsageError(f"kappa bound needs y >= 1, got {y}", error_code="BAD_PARAMETER")
    if n < 1:
        raise UsageError(f"n must be at least 1, got {n}", error_code="BAD_PARAMETER")
    return BoundValue.of(1.0 - (14.1 + 4.7 * math.sqrt(2.0 * math.log(y) / n)) * n / (y * sigma))


def bound_toeplitz_norm(n: int, mu: float, sigma: float, y: float) -> BoundValue:
    """Lower bound chi_{2n-1}(y / sqrt(2n-1)) on the cdf of ||T_n||"""
    _check_nonnegative(y)
    degrees = 2 * n - 1
    return BoundValue.of(chi_cdf(degrees, y / math.sqrt(degrees), sigma, mu))


def bound_inner_product(sigma: float, y: float) -> BoundValue:
    """Upper bound sqrt(2/pi) y / sigma on the cdf of |t^T b| for unit t"""
    _check_nonnegative(y)
    _check_sigma(sigma)
    return BoundValue.of(math.sqrt(2.0 / math.pi) * y / sigma)


def bound_circulant(n: int, mu: float, sigma: float, y: float, which: str = "norm") -> BoundValue:
    """
    which='norm': lower bound chi_n(sqrt(2/n) y) on the cdf of ||C||.
    which='inv': upper bound sqrt(2/pi) n y / sigma on the cdf of 1/||C^-1||.
    """
    _check_nonnegative(y)
    if which == "norm":
        return BoundValue.of(chi_cdf(n, math.sqrt(2.0 / n) * y, sigma, mu))
    if which == "inv":
        _check_sigma(sigma)
        return BoundValue.of(math.sqrt(2.0 / math.pi) * n * y / sigma)
    raise UsageError(f"which must be 'norm' or 'inv', got {which!r}", error_code="BAD_PARAMETER")


@dataclass(frozen=True)
class ToeplitzInverseBound:
    """
    Factor bound sqrt(2n/pi) y / sigma on the cdfs of alpha = 1/||p|| and
    beta = 1/||q||, and the composite ||p1 T^-1|| <= 2n alpha beta form.
    """
    factor: BoundValue
    n: int

    def composite(self, alpha: float, beta: float) -> float:
        return 2.0 * self.n * alpha * beta


def bound_toeplitz_inverse(n: int, sigma: float, y: float) -> ToeplitzInverseBound:
    _check_nonnegative(y)
    _check_sigma(sigma)
    return ToeplitzInverseBound(BoundValue.of(math.sqrt(2.0 * n / math.pi) * y / sigma), n)


def _param(params: Mapping[str, float], name: str, default=None):
    value = params.get(name, default)
    if value is None:
        raise UsageError(f"Bound parameter {name!r} is required", error_code="MISSING_PARAMETER")
    return value


BOUNDS: Dict[str, CdfBound] = {
    "sv_general": CdfBound(
        "sv_general", BoundDirection.UPPER,
        lambda y, p: bound_sv_general(int(_param(p, "l", p.get("n"))), _param(p, "sigma", 1.0), y),
        "cdf of sigma_min of an n x n Gaussian matrix",
    ),
    "norm_general": CdfBound(
        "norm_general", BoundDirection.LOWER,
        lambda y, p: bound_norm_general(int(_param(p, "h", p.get("n"))), _param(p, "sigma", 1.0), y),
        "cdf of the norm of an n x n Gaussian matrix",
    ),
    "kappa_general": CdfBound(
        "kappa_general", BoundDirection.LOWER,
        lambda y, p: bound_kappa_general(int(_param(p, "n")), _param(p, "sigma", 1.0), y),
        "cdf of kappa of an n x n Gaussian matrix",
    ),
    "toeplitz_norm": CdfBound(
        "toeplitz_norm", BoundDirection.LOWER,
        lambda y, p: bound_toeplitz_norm(int(_param(p, "n")), _param(p, "mu", 0.0), _param(p, "sigma", 1.0), y),
        "cdf of the norm of an n x n Gaussian Toeplitz matrix",
    ),
    "inner_product": CdfBound(
        "inner_product", BoundDirection.UPPER,
        lambda y, p: bound_inner_product(_param(p, "sigma", 1.0), y),
        "cdf of |t^T b| for a fixed unit t and Gaussian b",
    ),
    "circulant_norm": CdfBound(
        "circulant_norm", BoundDirection.LOWER,
        lambda y, p: bound_circulant(int(_param(p, "n")), _param(p, "mu", 0.0), _param(p, "sigma", 1.0), y, "norm"),
        "cdf of the norm of an n x n Gaussian circulant",
    ),
    "circulant_inv": CdfBound(
        "circulant_inv", BoundDirection.UPPER,
        lambda y, p: bound_circulant(int(_param(p, "n")), _param(p, "mu", 0.0), _param(p, "sigma", 1.0), y, "inv"),
        "cdf of sigma_min of an n x n Gaussian circulant",
    ),
    "toeplitz_inv_factors": CdfBound(
        "toeplitz_inv_factors", BoundDirection.UPPER,
        lambda y, p: bound_toeplitz_inverse(int(_param(p, "n")), _param(p, "sigma", 1.0), y).factor,
        "cdfs of 1/||p|| and 1/||q|| for p = T^-1 e_1, q = T^-1 e_n",
    ),
}


def get_bound(name: str) -> CdfBound:
    try:
        return BOUNDS[name]
    except KeyError:
        raise UsageError(f"Unknown bound {name!r}; choose from {', '.join(BOUNDS)}", error_code="UNKNOWN_BOUND")


def is_monotone(bound: CdfBound, grid: np.ndarray, params: Mapping[str, float]) -> bool:
    """Nondecreasing raw values over an ascending grid"""
    values = [bound.evaluate(float(y), params).raw for y in grid]
    return all(b >= a - 1e-15 for a, b in zip(values, values[1:]))
