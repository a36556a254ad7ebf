import json

import numpy as np
import pytest

from dpsc.model import (
    DataError,
    DonorPanel,
    LatentModelSpec,
    PanelTruth,
    TargetSeries,
    TargetTruth,
    dataset_to_csv,
    panel_from_csv,
    panel_from_json,
    panel_to_csv,
    panel_to_json,
    rmse_post,
    split,
    target_from_json,
    target_to_json,
    validate_bounds,
)
from dpsc.datagen import generate_linear_panel

from conftest import rmse_loop_oracle


class TestSplit:
    def test_two_by_three(self):
        panel = DonorPanel(values=[[1, 2, 3], [4, 5, 6]], t0=2)
        pre, post = split(panel)
        assert pre.tolist() == [[1, 2], [4, 5]]
        assert post.tolist() == [[3], [6]]

    def test_boundary_split_has_single_post_column(self):
        panel = DonorPanel(values=np.arange(12.0).reshape(3, 4), t0=3)
        _, post = split(panel)
        assert post.shape == (3, 1)

    def test_reassembly_is_exact(self):
        rng = np.random.default_rng(3)
        values = rng.normal(size=(10, 13))
        panel = DonorPanel(values=values, t0=10)
        pre, post = split(panel)
        assert pre.shape == (10, 10) and post.shape == (10, 3)
        assert np.array_equal(np.hstack([pre, post]), values)


class TestRmsePost:
    def test_identity_is_zero(self):
        m = np.array([1.0, 2.0, 3.0])
        assert rmse_post(m, m) == 0.0

    def test_pythagorean(self):
        m = np.zeros(2)
        assert rmse_post(np.array([3.0, 4.0]), m) == pytest.approx(5.0 / np.sqrt(2.0), abs=1e-15)

    def test_matches_loop_oracle(self):
        rng = np.random.default_rng(11)
        a = rng.normal(size=7)
        b = rng.normal(size=7)
        assert rmse_post(a, b) == pytest.approx(rmse_loop_oracle(a, b), abs=1e-12)

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            rmse_post(np.ones(3), np.ones(4))

    def test_scaling_property(self):
        rng = np.random.default_rng(12)
        for _ in range(20):
            m = rng.normal(size=5)
            a = rng.normal(size=5)
            alpha = rng.normal()
            lhs = rmse_post(alpha * a + m, m)
            rhs = abs(alpha) * rmse_post(a + m, m)
            assert lhs == pytest.approx(rhs, rel=1e-12)


class TestInvariants:
    def test_truth_decomposition_is_exact(self):
        rng = np.random.default_rng(5)
        M = rng.normal(size=(4, 6))
        Z = rng.normal(size=(4, 6))
        panel = DonorPanel(values=M + Z, t0=3, truth=PanelTruth(M, Z))
        # construction contract: values equals the machine sum M + Z exactly
        assert np.array_equal(panel.values, panel.truth.M + panel.truth.Z)
        # recovering Z by subtraction is exact up to one rounding of the sum
        ulp = np.spacing(np.abs(panel.values))
        assert np.all(np.abs((panel.values - panel.truth.M) - panel.truth.Z) <= ulp)

    def test_truth_mismatch_rejected(self):
        M = np.ones((2, 3))
        Z = np.zeros((2, 3))
        with pytest.raises(DataError):
            DonorPanel(values=M + Z + 1e-9, t0=1, truth=PanelTruth(M, Z))

    def test_bad_t0_rejected(self):
        with pytest.raises(DataError):
            DonorPanel(values=np.ones((2, 3)), t0=3)
        with pytest.raises(DataError):
            DonorPanel(values=np.ones((2, 3)), t0=0)

    def test_nonfinite_rejected(self):
        bad = np.ones((2, 3))
        bad[0, 0] = np.nan
        with pytest.raises(DataError):
            DonorPanel(values=bad, t0=1)

    def test_values_are_immutable(self):
        panel = DonorPanel(values=np.ones((2, 3)), t0=1)
        with pytest.raises(ValueError):
            panel.values[0, 0] = 2.0

    def test_target_truth_exact(self):
        m = np.arange(4.0)
        z = np.full(4, 0.25)
        target = TargetSeries(values=m + z, t0=2, truth=TargetTruth(m, z))
        assert np.array_equal(target.values, m + z)
        assert np.array_equal(target.m_post, m[2:])


class TestValidateBounds:
    def test_bounded(self):
        panel = DonorPanel(values=np.full((2, 3), 0.5), t0=1)
        target = TargetSeries(values=np.full(3, -1.0), t0=1)
        report = validate_bounds(panel, target)
        assert report.bounded and report.first_violation is None
        assert panel.bounded_flag

    def test_single_violation_located(self):
        values = np.full((2, 3), 0.5)
        values[1, 2] = 1.5
        report = validate_bounds(DonorPanel(values=values, t0=1))
        assert not report.bounded
        assert report.first_violation == ("panel", 1, 2)
        assert report.max_abs == 1.5

    def test_target_violation_located(self):
        panel = DonorPanel(values=np.full((2, 3), 0.5), t0=1)
        target = TargetSeries(values=np.array([0.0, 2.0, 0.0]), t0=1)
        report = validate_bounds(panel, target)
        assert not report.bounded and report.panel_bounded
        assert report.first_violation == ("target", 1)

    def test_linear_generator_output_is_unbounded(self):
        panel, target = generate_linear_panel(10, 10, 13, seed=123)
        report = validate_bounds(panel, target)
        assert not report.bounded
        assert not panel.bounded_flag
        # slope >= 3 at t = 13 with noise >= -1 puts entries far above 1
        assert report.max_abs > 35.0


class TestSerialization:
    def test_json_round_trip_bit_exact(self):
        rng = np.random.default_rng(17)
        M = rng.normal(size=(3, 5)) / 3.0
        Z = rng.normal(size=(3, 5)) / 7.0
        panel = DonorPanel(values=M + Z, t0=2, truth=PanelTruth(M, Z))
        back = panel_from_json(panel_to_json(panel))
        assert np.array_equal(back.values, panel.values)
        assert np.array_equal(back.truth.M, panel.truth.M)
        assert np.array_equal(back.truth.Z, panel.truth.Z)
        assert back.t0 == panel.t0

        m = rng.normal(size=5)
        z = rng.normal(size=5)
        target = TargetSeries(values=m + z, t0=2, truth=TargetTruth(m, z))
        back_t = target_from_json(target_to_json(target))
        assert np.array_equal(back_t.values, target.values)
        assert np.array_equal(back_t.truth.m, target.truth.m)

    def test_json_header_consistency_checked(self):
        panel = DonorPanel(values=np.ones((2, 3)), t0=1)
        doc = json.loads(panel_to_json(panel))
        doc["n"] = 5
        with pytest.raises(DataError):
            panel_from_json(json.dumps(doc))

    def test_csv_round_trip(self):
        rng = np.random.default_rng(23)
        panel = DonorPanel(values=rng.normal(size=(4, 6)), t0=3)
        text = panel_to_csv(panel)
        assert text.splitlines()[0] == "donor_id,t1,t2,t3,t4,t5,t6"
        back = panel_from_csv(text, t0=3)
        assert np.array_equal(back.values, panel.values)

    def test_dataset_csv_has_target_row(self):
        panel = DonorPanel(values=np.ones((2, 3)), t0=1)
        target = TargetSeries(values=np.zeros(3), t0=1)
        lines = dataset_to_csv(panel, target).splitlines()
        assert lines[-1].startswith("target,")
        back = panel_from_csv("\n".join(lines), t0=1)
        assert back.n == 2  # target row is not a donor


class TestLatentModelSpec:
    def test_validation(self):
        with pytest.raises(DataError):
            LatentModelSpec(theta_lo=5.0, theta_hi=3.0)
        with pytest.raises(DataError):
            LatentModelSpec(noise_var=-0.1)
        with pytest.raises(DataError):
            LatentModelSpec(noise_support=0.0)
        spec = LatentModelSpec()
        assert spec.theta_mean == 4.0 and spec.noise_var == 0.1
