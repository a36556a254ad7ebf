import math

import numpy as np
import pytest
from scipy import integrate

from dpsc.datagen import (
    generate_bounded_panel,
    generate_bounded_target,
    generate_linear_panel,
    generate_linear_panel_detailed,
    truncated_gaussian,
)
from dpsc.model import DataError, LatentModelSpec


def truncated_variance_quadrature(mean, var, lo, hi):
    """Numeric-integration oracle for the variance of a truncated normal."""
    sd = math.sqrt(var)

    def pdf(x):
        return math.exp(-0.5 * ((x - mean) / sd) ** 2) / (sd * math.sqrt(2 * math.pi))

    mass, _ = integrate.quad(pdf, lo, hi)
    mu, _ = integrate.quad(lambda x: x * pdf(x), lo, hi)
    mu /= mass
    second, _ = integrate.quad(lambda x: x * x * pdf(x), lo, hi)
    return second / mass - mu * mu


class TestTruncatedGaussian:
    def test_support_guarantee(self):
        rng = np.random.default_rng(1)
        lo, hi = 3.999, 4.001
        for _ in range(200):
            draw = truncated_gaussian(4.0, 1.0, lo, hi, rng)
            assert lo <= draw <= hi

    def test_symmetric_truncation_preserves_mean(self):
        rng = np.random.default_rng(2)
        draws = np.array([truncated_gaussian(4.0, 1.0, 3.0, 5.0, rng) for _ in range(100_000)])
        assert abs(draws.mean() - 4.0) <= 0.02

    def test_variance_matches_quadrature_oracle(self):
        rng = np.random.default_rng(3)
        draws = np.array([truncated_gaussian(0.0, 0.1, -1.0, 1.0, rng) for _ in range(20_000)])
        expected = truncated_variance_quadrature(0.0, 0.1, -1.0, 1.0)
        assert abs(draws.var() - expected) <= 0.05 * expected

    def test_pathological_truncation_rejected(self):
        rng = np.random.default_rng(4)
        with pytest.raises(DataError, match="pathological"):
            truncated_gaussian(0.0, 1e-6, 10.0, 11.0, rng)

    def test_invalid_interval_rejected(self):
        rng = np.random.default_rng(5)
        with pytest.raises(DataError):
            truncated_gaussian(0.0, 1.0, 2.0, 1.0, rng)


class TestLinearPanel:
    def test_noiseless_panel_is_rank_one(self):
        spec = LatentModelSpec(noise_var=0.0)
        panel, target = generate_linear_panel(6, 5, 8, spec, seed=10)
        assert np.array_equal(panel.values, panel.truth.M)
        assert np.linalg.matrix_rank(panel.values) == 1
        assert np.array_equal(target.values, target.truth.m)

    def test_seeded_determinism(self):
        one = generate_linear_panel(10, 10, 13, seed=11)
        two = generate_linear_panel(10, 10, 13, seed=11)
        assert np.array_equal(one[0].values, two[0].values)
        assert np.array_equal(one[1].values, two[1].values)

    def test_slopes_and_noise_respect_supports(self):
        data = generate_linear_panel_detailed(50, 10, 13, seed=12)
        assert np.all((data.theta >= 3.0) & (data.theta <= 5.0))
        assert 3.0 <= data.theta0 <= 5.0
        assert np.all(np.abs(data.panel.truth.Z) <= 1.0)
        assert np.all(np.abs(data.target.truth.z) <= 1.0)
        assert not data.panel.bounded_flag  # slope * t exceeds 1 immediately

    def test_signal_is_linear_in_time(self):
        data = generate_linear_panel_detailed(4, 5, 8, seed=13)
        times = np.arange(1, 9)
        np.testing.assert_allclose(data.panel.truth.M, np.outer(data.theta, times))
        np.testing.assert_allclose(data.target.truth.m, data.theta0 * times)

    def test_target_theta_override(self):
        spec = LatentModelSpec(target_theta=4.25)
        data = generate_linear_panel_detailed(3, 4, 7, spec, seed=14)
        assert data.theta0 == 4.25

    def test_donor_mean_mode_gives_exact_uniform_representation(self):
        spec = LatentModelSpec(noise_var=0.0)
        data = generate_linear_panel_detailed(
            7, 6, 9, spec, seed=15, theta0_from_donor_mean=True
        )
        weights = np.full(7, 1.0 / 7.0)
        assert np.linalg.norm(weights, 1) == pytest.approx(1.0)
        np.testing.assert_allclose(
            data.panel.truth.M.T @ weights, data.target.truth.m, rtol=1e-12
        )

    def test_bad_shape_rejected(self):
        with pytest.raises(DataError):
            generate_linear_panel(5, 8, 8, seed=16)


class TestBoundedPanel:
    def test_always_bounded(self):
        for seed in range(5):
            panel = generate_bounded_panel(6, 4, 7, seed=seed)
            assert panel.bounded_flag

    def test_mean_entry_near_zero(self):
        panel = generate_bounded_panel(1000, 500, 1000, seed=17)
        assert abs(panel.values.mean()) <= 0.01

    def test_seeded_determinism(self):
        one = generate_bounded_panel(5, 4, 7, seed=18)
        two = generate_bounded_panel(5, 4, 7, seed=18)
        assert np.array_equal(one.values, two.values)
        t1 = generate_bounded_target(4, 7, seed=19)
        t2 = generate_bounded_target(4, 7, seed=19)
        assert np.array_equal(t1.values, t2.values)
