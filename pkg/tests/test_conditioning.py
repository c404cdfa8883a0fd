"""Tests for norms, spectra and condition estimates"""

import numpy as np
import pytest

from src.config.settings import OracleConfig
from src.core import dense_oracle
from src.core.conditioning import (
    as_operator, circulant_spectrum, estimate_spectrum, fcirculant_bracket_check, gs_norm_split_check,
    frobenius_norm, hadamard_geomean_check, inv_norm1_estimate, inverse_operator, norm2_power, norm_report,
    norms_exact, sigma_min_from_inverse, sigma_min_inverse_power,
)
from src.core.exceptions import UsageError
from src.core.gs_inversion import build_gs_a
from src.core.structured_matrices import FCirculantSpec, HankelSpec, ToeplitzSpec, to_dense


def philox(seed=3):
    return np.random.Generator(np.random.Philox(seed))


def unit(n, c=1.0):
    e = np.zeros(n)
    e[0] = c
    return e


class TestExactNorms:
    def test_circulant(self, rng):
        v = rng.standard_normal(10)
        one, inf = norms_exact(FCirculantSpec(10, v, 1.0))
        assert one == pytest.approx(np.abs(v).sum(), rel=1e-14)
        assert inf == pytest.approx(np.abs(v).sum(), rel=1e-14)

    def test_identity(self):
        assert norms_exact(ToeplitzSpec.identity(7)) == (1.0, 1.0)

    @pytest.mark.parametrize("spec", [
        ToeplitzSpec(64, 48, np.random.default_rng(1).standard_normal(111)),
        ToeplitzSpec(5, 30, np.random.default_rng(2).standard_normal(34)),
        HankelSpec(9, 13, np.random.default_rng(3).standard_normal(21)),
        FCirculantSpec(11, np.random.default_rng(4).standard_normal(11), -2.0),
        np.random.default_rng(5).standard_normal((6, 4)),
    ])
    def test_match_dense(self, spec):
        dense = np.abs(to_dense(spec))
        one, inf = norms_exact(spec)
        assert one == pytest.approx(dense.sum(axis=0).max(), rel=1e-12)
        assert inf == pytest.approx(dense.sum(axis=1).max(), rel=1e-12)

    @pytest.mark.parametrize("spec", [
        ToeplitzSpec(64, 48, np.random.default_rng(1).standard_normal(111)),
        ToeplitzSpec(5, 30, np.random.default_rng(2).standard_normal(34)),
        HankelSpec(9, 13, np.random.default_rng(3).standard_normal(21)),
        FCirculantSpec(11, np.random.default_rng(4).standard_normal(11), -2.0),
        ToeplitzSpec.identity(1),
        np.random.default_rng(5).standard_normal((6, 4)),
    ])
    def test_frobenius_matches_dense(self, spec):
        assert frobenius_norm(spec) == pytest.approx(np.linalg.norm(to_dense(spec)), rel=1e-12)

    def test_frobenius_of_circulant(self, rng):
        v = rng.standard_normal(16)
        assert frobenius_norm(FCirculantSpec(16, v, 1.0)) == pytest.approx(4.0 * np.linalg.norm(v), rel=1e-13)


class TestOperators:
    @pytest.mark.parametrize("spec", [
        ToeplitzSpec(7, 5, np.random.default_rng(1).standard_normal(11)),
        HankelSpec(6, 8, np.random.default_rng(2).standard_normal(13)),
        FCirculantSpec(9, np.random.default_rng(3).standard_normal(9), 1.0),
        FCirculantSpec(9, np.random.default_rng(4).standard_normal(9), -1.0),
        FCirculantSpec(9, np.random.default_rng(5).standard_normal(9), 3.0),
        np.random.default_rng(6).standard_normal((4, 6)),
    ])
    def test_matvec_and_rmatvec(self, spec, rng):
        dense = to_dense(spec)
        op = as_operator(spec)
        x = rng.standard_normal(dense.shape[1])
        y = rng.standard_normal(dense.shape[0])
        assert op.shape == dense.shape
        np.testing.assert_allclose(op.matvec(x), dense @ x, atol=1e-10)
        np.testing.assert_allclose(op.rmatvec(y), dense.T @ y, atol=1e-10)

    @pytest.mark.parametrize("spec", [
        ToeplitzSpec(12, 12, np.random.default_rng(7).standard_normal(23)),
        HankelSpec(12, 12, np.random.default_rng(8).standard_normal(23)),
        FCirculantSpec(12, np.random.default_rng(9).standard_normal(12), 1.0),
        FCirculantSpec(12, np.random.default_rng(10).standard_normal(12), -1.0),
        np.random.default_rng(11).standard_normal((12, 12)),
    ])
    def test_inverse_operator(self, spec, rng):
        dense = to_dense(spec)
        apply_inverse, apply_inverse_transpose = inverse_operator(spec)
        x = rng.standard_normal(12)
        np.testing.assert_allclose(dense @ apply_inverse(x), x, atol=1e-8)
        np.testing.assert_allclose(dense.T @ apply_inverse_transpose(x), x, atol=1e-8)


class TestPowerIterations:
    def test_norm_of_scaled_unit_circulant(self):
        estimate = norm2_power(FCirculantSpec(8, unit(8, -2.5), 1.0), rng=philox())
        assert estimate.value == pytest.approx(2.5, rel=1e-12)
        assert estimate.converged

    def test_norm_of_identity(self):
        assert norm2_power(ToeplitzSpec.identity(6), rng=philox()).value == pytest.approx(1.0, rel=1e-12)

    def test_norm_matches_oracle(self, random_toeplitz):
        T = random_toeplitz(96)
        sigma = dense_oracle.jacobi_svd(to_dense(T))[0]
        estimate = norm2_power(T, max_iter=20000, tol=1e-13, rng=philox())
        assert estimate.value <= sigma * (1 + 1e-12)
        assert estimate.value == pytest.approx(sigma, rel=1e-6)

    def test_sigma_min_of_scaled_identity(self):
        T = ToeplitzSpec(4, 4, [0, 0, 0, 3.0, 0, 0, 0])
        estimate = sigma_min_inverse_power(T, build_gs_a(T), rng=philox())
        assert estimate.value == pytest.approx(3.0, rel=1e-12)

    def test_sigma_min_two_by_two(self):
        T = ToeplitzSpec.symmetric([2.0, 1.0])
        estimate = sigma_min_inverse_power(T, build_gs_a(T), tol=1e-14, rng=philox())
        assert estimate.value == pytest.approx(1.0, rel=1e-10)

    def test_sigma_min_matches_oracle(self, random_toeplitz):
        T = random_toeplitz(96, 1)
        sigma = dense_oracle.jacobi_svd(to_dense(T))[-1]
        estimate = sigma_min_inverse_power(T, build_gs_a(T), max_iter=20000, tol=1e-13, rng=philox())
        assert estimate.value == pytest.approx(sigma, rel=1e-5)

    def test_sigma_min_through_transpose_representation(self, random_toeplitz):
        T = random_toeplitz(20, 2)
        sigma = dense_oracle.jacobi_svd(to_dense(T))[-1]
        estimate = sigma_min_inverse_power(T, build_gs_a(T), max_iter=20000, tol=1e-13, rng=philox(),
                                           gs_transpose=build_gs_a(T.transpose()))
        assert estimate.value == pytest.approx(sigma, rel=1e-5)

    def test_sigma_min_from_dense_inverse(self, rng):
        A = rng.standard_normal((15, 15))
        apply_inverse, apply_inverse_transpose = inverse_operator(A)
        estimate = sigma_min_from_inverse(apply_inverse, apply_inverse_transpose, 15,
                                          max_iter=20000, tol=1e-13, rng=philox())
        assert estimate.value == pytest.approx(dense_oracle.jacobi_svd(A)[-1], rel=1e-5)

    def test_mismatched_representation(self, random_toeplitz):
        with pytest.raises(UsageError):
            sigma_min_inverse_power(random_toeplitz(5), build_gs_a(random_toeplitz(6)))

    def test_iteration_cap_flags_non_convergence(self, random_toeplitz):
        estimate = norm2_power(random_toeplitz(40), max_iter=2, tol=1e-16, rng=philox())
        assert not estimate.converged
        assert estimate.iterations == 2


class TestInverseNormEstimate:
    def test_identity_inverse(self):
        identity = lambda x: np.asarray(x, dtype=float)  # noqa: E731
        assert inv_norm1_estimate(identity, identity, 4) == pytest.approx(1.0, abs=1e-14)
        assert inv_norm1_estimate(identity, identity, 1) == 1.0

    def test_scaled_unit_circulant(self):
        apply_inverse, apply_inverse_transpose = inverse_operator(FCirculantSpec(8, unit(8, 4.0), 1.0))
        assert inv_norm1_estimate(apply_inverse, apply_inverse_transpose, 8) == pytest.approx(0.25, rel=1e-12)

    def test_lower_bound_and_usually_exact(self, random_toeplitz):
        exact_hits = 0
        for index in range(100):
            T = random_toeplitz(64, index, seed=64)
            exact = np.abs(dense_oracle.dense_inverse(to_dense(T))).sum(axis=0).max()
            apply_inverse, apply_inverse_transpose = inverse_operator(T)
            estimate = inv_norm1_estimate(apply_inverse, apply_inverse_transpose, 64)
            assert estimate <= exact * (1 + 1e-10)
            exact_hits += estimate >= exact * (1 - 1e-10)
        assert exact_hits >= 90

    def test_exact_when_every_column_is_a_candidate(self, rng):
        A = rng.standard_normal((20, 20))
        exact = np.abs(np.linalg.inv(A)).sum(axis=0).max()
        apply_inverse, apply_inverse_transpose = inverse_operator(A)
        estimate = inv_norm1_estimate(apply_inverse, apply_inverse_transpose, 20, candidates=20)
        assert estimate == pytest.approx(exact, rel=1e-10)

    def test_solve_budget(self, random_toeplitz):
        apply_inverse, apply_inverse_transpose = inverse_operator(random_toeplitz(128, 3))
        calls = []

        def counted(x):
            calls.append(1)
            return apply_inverse(x)

        inv_norm1_estimate(counted, apply_inverse_transpose, 128, max_sweeps=5, candidates=8)
        # start vector, four sweeps of candidates, alternating vector
        assert len(calls) <= 1 + 4 * 8 + 1


class TestCirculantSpectrum:
    def test_identity(self):
        spectrum = circulant_spectrum(FCirculantSpec(6, unit(6), 1.0))
        np.testing.assert_allclose(spectrum.singular_values, np.ones(6), atol=1e-15)
        assert not spectrum.singular
        assert spectrum.kappa == pytest.approx(1.0)

    def test_all_ones_is_singular(self):
        spectrum = circulant_spectrum(FCirculantSpec(4, np.ones(4), 1.0))
        np.testing.assert_allclose(spectrum.singular_values, [4, 0, 0, 0], atol=1e-14)
        assert spectrum.singular
        assert spectrum.kappa == float("inf")
        assert spectrum.summary().sigma_min == 0.0

    @pytest.mark.parametrize("n", [48, 64, 13])
    def test_matches_oracle(self, n, rng):
        C = FCirculantSpec(n, rng.uniform(-1, 1, n), 1.0)
        spectrum = circulant_spectrum(C)
        dense = dense_oracle.jacobi_svd(to_dense(C))
        np.testing.assert_allclose(spectrum.singular_values, dense, atol=1e-10)
        assert spectrum.kappa == pytest.approx(dense[0] / dense[-1], rel=1e-9)

    def test_requires_circulant(self):
        with pytest.raises(UsageError):
            circulant_spectrum(FCirculantSpec(3, np.ones(3), 2.0))


class TestEstimateSpectrum:
    def test_small_sizes_use_dense_values(self, random_toeplitz):
        T = random_toeplitz(32)
        s = dense_oracle.jacobi_svd(to_dense(T))
        assert estimate_spectrum(T).kappa2 == pytest.approx(s[0] / s[-1], rel=1e-10)

    def test_hankel_shares_toeplitz_conditioning(self, rng):
        H = HankelSpec(16, 16, rng.standard_normal(31))
        s = dense_oracle.jacobi_svd(to_dense(H))
        assert estimate_spectrum(H).kappa2 == pytest.approx(s[0] / s[-1], rel=1e-10)

    @pytest.mark.parametrize("kind", ["toeplitz", "general", "fcirculant"])
    def test_estimator_path(self, kind, monkeypatch, random_toeplitz, rng):
        monkeypatch.setattr(OracleConfig, "ORACLE_SVD_THRESHOLD", 8)
        if kind == "toeplitz":
            spec = random_toeplitz(40, 3)
        elif kind == "general":
            spec = rng.standard_normal((40, 40))
        else:
            spec = FCirculantSpec(40, rng.standard_normal(40), -1.0)
        s = dense_oracle.jacobi_svd(to_dense(spec))
        summary = estimate_spectrum(spec, rng=philox())
        assert summary.all_converged
        assert summary.sigma_max == pytest.approx(s[0], rel=1e-3)
        assert summary.sigma_min == pytest.approx(s[-1], rel=1e-3)

    def test_circulant_is_exact(self, rng):
        C = FCirculantSpec(300, rng.standard_normal(300), 1.0)
        summary = estimate_spectrum(C)
        assert summary.kappa2 == pytest.approx(circulant_spectrum(C).kappa, rel=1e-14)

    def test_norm_report_is_consistent(self, random_toeplitz):
        T = random_toeplitz(50)
        report = norm_report(T, rng=philox(), inverse=inverse_operator(T))
        assert report.consistent(50, 50)
        assert report.inv_one_norm_estimate > 0


class TestBracket:
    def test_same_matrix(self, rng):
        report = fcirculant_bracket_check(rng.standard_normal(8), 1.0, 8)
        assert report.g_empirical == pytest.approx(1.0, rel=1e-10)
        assert report.holds

    def test_identity_both_sides(self):
        report = fcirculant_bracket_check(unit(8), 2.0, 8)
        assert report.g_empirical == pytest.approx(1.0, rel=1e-10)
        assert report.holds

    def test_reports_empirical_scaling(self, rng):
        report = fcirculant_bracket_check(rng.standard_normal(8), 2.0, 8)
        assert report.g_claimed == 4.0
        assert report.g_empirical >= 1.0
        assert report.sigma_f.shape == report.sigma_1.shape == (8,)

    def test_invalid_arguments(self, rng):
        with pytest.raises(UsageError):
            fcirculant_bracket_check(rng.standard_normal(4), 0.0, 4)
        with pytest.raises(UsageError):
            fcirculant_bracket_check(rng.standard_normal(65), 2.0, 65)


class TestHadamard:
    def test_identity(self):
        report = hadamard_geomean_check(ToeplitzSpec.identity(6), 1.0)
        assert report.log_geomean == pytest.approx(0.0, abs=1e-15)
        assert report.holds

    def test_orthogonal_rows_are_tight(self):
        report = hadamard_geomean_check(ToeplitzSpec(2, 2, [1.0, 1.0, -1.0]), 1.0)
        assert report.log_abs_det == pytest.approx(np.log(2.0))
        assert report.log_geomean == pytest.approx(report.log_bound)
        assert report.log_abs_det == pytest.approx(report.log_hadamard_bound)
        assert report.holds

    def test_random(self, random_toeplitz):
        report = hadamard_geomean_check(random_toeplitz(32, 4), 1.0)
        assert report.holds
        assert report.log_det_discrepancy <= 1e-8

    def test_entries_above_bound(self):
        with pytest.raises(UsageError):
            hadamard_geomean_check(ToeplitzSpec.symmetric([2.0, 1.0]), 1.0)


def test_norm_split_chain(random_toeplitz):
    for index in range(5):
        report = gs_norm_split_check(build_gs_a(random_toeplitz(20, index)))
        assert report.holds
        assert report.scaled_inverse_norm <= report.two_norm_product
