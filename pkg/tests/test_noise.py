import math

import numpy as np
import pytest

from dpsc.noise import (
    SensitivitySpec,
    coefficient_gap,
    empirical_sensitivity_probe,
    fixture_expected_coeffs,
    rank_one_neighbor_fixture,
    sample_gaussian_vector,
    sample_highdim_laplace,
    sample_matrix_laplace,
    sensitivity_post_matrix,
    sensitivity_ridge_coeffs,
)
from dpsc.ridge import ridge_fit

from conftest import gaussian_elimination_solve


class TestSensitivityFormulas:
    def test_coeff_sensitivity_plug_ins(self):
        assert sensitivity_ridge_coeffs(SensitivitySpec(8, 1, 1.0)) == pytest.approx(16.0)
        assert sensitivity_ridge_coeffs(SensitivitySpec(10, 10, 10.0)) == pytest.approx(
            4.0 * math.sqrt(18.0), abs=1e-12
        )

    def test_coeff_sensitivity_halves_when_lambda_doubles(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            n = int(rng.integers(1, 50))
            t0 = int(rng.integers(1, 50))
            lam = float(rng.uniform(0.1, 100))
            one = sensitivity_ridge_coeffs(SensitivitySpec(n, t0, lam))
            two = sensitivity_ridge_coeffs(SensitivitySpec(n, t0, 2 * lam))
            assert two == pytest.approx(one / 2.0, rel=1e-12)

    def test_post_matrix_sensitivity(self):
        assert sensitivity_post_matrix(1) == 2.0
        assert sensitivity_post_matrix(4) == 4.0
        assert sensitivity_post_matrix(3) == pytest.approx(2.0 * math.sqrt(3.0), abs=1e-14)
        with pytest.raises(ValueError):
            sensitivity_post_matrix(0)


class TestHighdimLaplace:
    def test_zero_scale_is_zero_vector(self):
        rng = np.random.default_rng(2)
        assert np.array_equal(sample_highdim_laplace(7, 0.0, rng), np.zeros(7))

    def test_dim1_tail_is_exponential(self):
        rng = np.random.default_rng(3)
        draws = sample_highdim_laplace(1, 1.0, rng, size=100_000)
        tail = np.mean(np.abs(draws[:, 0]) > 1.0)
        assert abs(tail - math.exp(-1.0)) <= 0.01 * math.exp(-1.0)

    def test_dim5_radial_moments(self):
        rng = np.random.default_rng(4)
        draws = sample_highdim_laplace(5, 1.0, rng, size=100_000)
        norms = np.linalg.norm(draws, axis=1)
        assert abs(norms.mean() - 5.0) <= 0.02 * 5.0  # radial mean = dim * scale
        assert abs(norms.var() - 5.0) <= 0.05 * 5.0  # radial variance = dim * scale^2
        assert np.linalg.norm(draws.mean(axis=0)) <= 0.02

    def test_matrix_form_matches_vector_sampler(self):
        a = sample_matrix_laplace(2, 2, 1.0, np.random.default_rng(5))
        b = sample_highdim_laplace(4, 1.0, np.random.default_rng(5))
        assert np.array_equal(a.ravel(), b)

    def test_matrix_zero_scale(self):
        rng = np.random.default_rng(6)
        assert np.array_equal(sample_matrix_laplace(3, 2, 0.0, rng), np.zeros((3, 2)))

    def test_matrix_frobenius_mean(self):
        rng = np.random.default_rng(7)
        draws = sample_highdim_laplace(4, 1.0, rng, size=100_000)
        norms = np.linalg.norm(draws, axis=1)
        assert abs(norms.mean() - 4.0) <= 0.02 * 4.0

    def test_seeded_determinism(self):
        one = sample_highdim_laplace(6, 2.0, np.random.default_rng(8))
        two = sample_highdim_laplace(6, 2.0, np.random.default_rng(8))
        assert np.array_equal(one, two)

    def test_invalid_args(self):
        rng = np.random.default_rng(9)
        with pytest.raises(ValueError):
            sample_highdim_laplace(0, 1.0, rng)
        with pytest.raises(ValueError):
            sample_highdim_laplace(3, -1.0, rng)


class TestGaussianVector:
    def test_zero_stddev(self):
        rng = np.random.default_rng(10)
        assert np.array_equal(sample_gaussian_vector(5, 0.0, rng), np.zeros(5))

    def test_variance_within_two_percent(self):
        rng = np.random.default_rng(11)
        draws = sample_gaussian_vector(100_000, 2.0, rng)
        assert abs(draws.var() - 4.0) <= 0.02 * 4.0

    def test_coordinates_uncorrelated(self):
        rng = np.random.default_rng(12)
        draws = sample_gaussian_vector(2, 1.0, rng, size=100_000)
        rho = np.corrcoef(draws[:, 0], draws[:, 1])[0, 1]
        assert abs(rho) <= 0.02

    def test_seeded_determinism(self):
        one = sample_gaussian_vector(6, 1.5, np.random.default_rng(13))
        two = sample_gaussian_vector(6, 1.5, np.random.default_rng(13))
        assert np.array_equal(one, two)


class TestSensitivityProbe:
    def test_identical_rows_give_zero_gap(self):
        rng = np.random.default_rng(14)
        X = rng.uniform(-1, 1, size=(4, 6))
        y = rng.uniform(-1, 1, size=6)
        assert coefficient_gap(X, y, donor=2, new_row=X[2], lam=1.0) == 0.0

    def test_probe_respects_formula_bound(self):
        rng = np.random.default_rng(15)
        observed = empirical_sensitivity_probe(5, 5, 10.0, trials=200, rng=rng)
        bound = sensitivity_ridge_coeffs(SensitivitySpec(5, 5, 10.0))
        assert 0.0 < observed <= bound

    def test_fixture_gap_matches_closed_form_and_grows_as_sqrt_n(self):
        def gap(n):
            f, f_alt = fixture_expected_coeffs(n)
            return np.linalg.norm(f - f_alt)

        for n in (3, 10):
            panel, neighbor, target, _, _ = rank_one_neighbor_fixture(n)
            measured = coefficient_gap(
                panel.values[:, :n], target.y_pre, 0, neighbor.values[0, :n], lam=2.0
            )
            d = n * n + 2 * n - 1
            expected = math.sqrt(
                (n * n / d) ** 2 + (n - 1) * (n / d - n / (2 * n - 1)) ** 2
            )
            assert measured == pytest.approx(expected, abs=1e-9)
            assert measured == pytest.approx(gap(n), abs=1e-9)

        ratio = gap(100) / gap(25)
        assert 1.8 <= ratio <= 2.2


class TestFixtureAgainstEliminationOracle:
    def test_hand_coded_elimination_agrees(self):
        for n in (3, 10):
            panel, neighbor, target, f, f_alt = rank_one_neighbor_fixture(n)
            for values, expected in ((panel.values, f), (neighbor.values, f_alt)):
                X = values[:, :n]
                A = 2.0 * X @ X.T + 2.0 * np.eye(n)
                solved = gaussian_elimination_solve(A, 2.0 * X @ target.y_pre)
                np.testing.assert_allclose(solved, expected, atol=1e-9)
                fit = ridge_fit(X, target.y_pre, lam=2.0)
                np.testing.assert_allclose(fit.coeffs, solved, atol=1e-9)

    def test_fixture_panels_are_bounded(self):
        panel, neighbor, _, _, _ = rank_one_neighbor_fixture(5)
        assert panel.bounded_flag and neighbor.bounded_flag
