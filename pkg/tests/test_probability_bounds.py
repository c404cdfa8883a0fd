"""Tests for closed-form cdfs and cdf bounds"""

import math

import numpy as np
import pytest
from scipy import integrate
from scipy.special import gammainc, gammaln

from src.core.exceptions import DomainError, UsageError
from src.core.probability_bounds import (
    BOUNDS, BoundDirection, BoundValue, bound_circulant, bound_inner_product, bound_kappa_general,
    bound_norm_general, bound_sv_general, bound_toeplitz_inverse, bound_toeplitz_norm, chi_cdf, get_bound,
    is_monotone, regularized_gamma_p,
)


@pytest.mark.parametrize("a,x", [(0.5, 0.1), (0.5, 3.0), (5.0, 2.0), (5.0, 20.0), (16.0, 10.0), (31.5, 40.0)])
def test_incomplete_gamma_matches_scipy(a, x):
    assert regularized_gamma_p(a, x) == pytest.approx(gammainc(a, x), rel=1e-12, abs=1e-15)


def test_incomplete_gamma_domain():
    assert regularized_gamma_p(2.0, 0.0) == 0.0
    with pytest.raises(UsageError):
        regularized_gamma_p(0.0, 1.0)
    with pytest.raises(UsageError):
        regularized_gamma_p(1.0, -1.0)


class TestChi:
    def test_one_degree(self):
        assert chi_cdf(1, 1.0) == pytest.approx(0.6826894921, abs=1e-9)

    def test_two_degrees(self):
        assert chi_cdf(2, 2.0) == pytest.approx(0.8646647168, abs=1e-9)

    def test_shape(self):
        assert chi_cdf(5, 0.0) == 0.0
        assert chi_cdf(5, 50.0) == pytest.approx(1.0, abs=1e-15)
        values = [chi_cdf(7, y) for y in np.linspace(0.1, 6, 30)]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_scale(self):
        assert chi_cdf(3, 2.0, sigma=2.0) == pytest.approx(chi_cdf(3, 1.0))

    def test_errors(self):
        with pytest.raises(UsageError):
            chi_cdf(3, -0.1)
        with pytest.raises(DomainError):
            chi_cdf(3, 1.0, mu=1.0)

    @pytest.mark.parametrize("n", list(range(1, 65)))
    def test_matches_integrated_density(self, n):
        def density(t):
            if t == 0.0:
                return 1.0 / (2 ** (0.5 * n - 1) * math.gamma(0.5 * n)) if n == 1 else 0.0
            log_pdf = (n - 1) * math.log(t) - 0.5 * t * t - (0.5 * n - 1) * math.log(2.0) - gammaln(0.5 * n)
            return math.exp(log_pdf)

        mode = math.sqrt(n - 1)
        for y in [0.25, 0.5, 1.0, 2.0, 4.0, 6.0, 8.0, 12.0]:
            points = [mode] if 0.0 < mode < y else None
            area, _ = integrate.quad(density, 0.0, y, points=points, limit=200, epsabs=1e-13, epsrel=1e-12)
            assert chi_cdf(n, y) == pytest.approx(area, abs=1e-8)


class TestGeneralBounds:
    def test_singular_value(self):
        assert bound_sv_general(100, 1.0, 0.0).value == 0.0
        assert bound_sv_general(100, 1.0, 0.01).value == pytest.approx(0.235)

    def test_singular_value_tail_form(self):
        l, sigma, x = 100, 1.0, 10.0
        assert bound_sv_general(l, sigma, sigma / (2.35 * x * math.sqrt(l))).value == pytest.approx(0.1)

    def test_norm(self):
        assert bound_norm_general(100, 1.0, 20.0).value == 0.0
        assert bound_norm_general(100, 1.0, 25.0).value == pytest.approx(1 - math.exp(-12.5), rel=1e-12)
        assert bound_norm_general(100, 1.0, 25.0).value == pytest.approx(0.9999963, abs=1e-7)
        with pytest.raises(DomainError):
            bound_norm_general(100, 1.0, 19.0)

    def test_kappa(self):
        value = bound_kappa_general(100, 1.0, 1e6)
        assert value.value == pytest.approx(0.998343, abs=1e-6)
        assert not value.vacuous

    @pytest.mark.parametrize("n,sigma", [(1, 1.0), (10, 0.5), (100, 1.0)])
    def test_kappa_vacuous_at_one(self, n, sigma):
        value = bound_kappa_general(n, sigma, 1.0)
        assert value.raw == pytest.approx(1 - 14.1 * n / sigma)
        assert value.vacuous and value.value == 0.0

    def test_kappa_domain(self):
        with pytest.raises(UsageError):
            bound_kappa_general(10, 2.0, 10.0)
        with pytest.raises(UsageError):
            bound_kappa_general(10, 1.0, 0.5)


class TestStructuredBounds:
    def test_toeplitz_norm(self):
        assert bound_toeplitz_norm(32, 0.0, 1.0, 0.0).value == 0.0
        y = 9.0
        assert bound_toeplitz_norm(32, 0.0, 1.0, y).value == pytest.approx(chi_cdf(63, y / math.sqrt(63)))

    def test_inner_product(self):
        assert bound_inner_product(1.0, 0.0).value == 0.0
        assert bound_inner_product(1.0, 0.1).value == pytest.approx(0.0797885, abs=1e-7)

    def test_circulant(self):
        assert bound_circulant(256, 0.0, 1.0, 0.0, "norm").value == 0.0
        assert bound_circulant(256, 0.0, 1.0, 0.0, "inv").value == 0.0
        assert bound_circulant(256, 0.0, 1.0, 1e-4, "inv").value == pytest.approx(0.020426, abs=1e-6)
        with pytest.raises(UsageError):
            bound_circulant(4, 0.0, 1.0, 1.0, "both")

    def test_toeplitz_inverse(self):
        bound = bound_toeplitz_inverse(50, 1.0, 0.01)
        assert bound.factor.value == pytest.approx(0.05642, abs=1e-5)
        assert bound_toeplitz_inverse(50, 1.0, 0.0).factor.value == 0.0
        assert bound.composite(0.5, 0.25) == pytest.approx(25.0)


def test_vacuous_values_are_clamped():
    value = BoundValue.of(1.5)
    assert value.value == 1.0 and value.raw == 1.5 and value.vacuous
    assert not BoundValue.of(0.3).vacuous


def test_registry():
    assert set(BOUNDS) == {
        "sv_general", "norm_general", "kappa_general", "toeplitz_norm",
        "inner_product", "circulant_norm", "circulant_inv", "toeplitz_inv_factors",
    }
    assert get_bound("circulant_inv").direction is BoundDirection.UPPER
    assert get_bound("toeplitz_norm").direction is BoundDirection.LOWER
    with pytest.raises(UsageError):
        get_bound("nope")


@pytest.mark.parametrize("name,grid", [
    ("sv_general", np.linspace(0, 1, 21)),
    ("norm_general", np.linspace(2 * math.sqrt(16), 20, 21)),
    ("kappa_general", np.logspace(0, 6, 21)),
    ("toeplitz_norm", np.linspace(0, 20, 21)),
    ("inner_product", np.linspace(0, 2, 21)),
    ("circulant_norm", np.linspace(0, 20, 21)),
    ("circulant_inv", np.linspace(0, 0.1, 21)),
    ("toeplitz_inv_factors", np.linspace(0, 1, 21)),
])
def test_bounds_are_monotone(name, grid):
    assert is_monotone(get_bound(name), grid, {"n": 16, "mu": 0.0, "sigma": 1.0})
