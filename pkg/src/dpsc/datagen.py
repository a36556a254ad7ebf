"""Synthetic data generation: linear latent panels and bounded probe panels.

The linear model gives donor i the series theta_i * t with slope drawn from a
truncated Gaussian, plus truncated-Gaussian observation noise. Note the
resulting entries exceed [-1, 1] for any realistic horizon, so generated
panels carry bounded_flag = False; consumers decide how to treat that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .model import (
    DataError,
    DonorPanel,
    LatentModelSpec,
    PanelTruth,
    TargetSeries,
    TargetTruth,
)

__all__ = [
    "truncated_gaussian",
    "generate_linear_panel",
    "generate_linear_panel_detailed",
    "generate_bounded_panel",
    "generate_bounded_target",
    "LinearPanelData",
]

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator]

_MIN_ACCEPTANCE = 1e-12


def _as_rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _normal_cdf(x: float) -> float:
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


def _acceptance_probability(mean: float, var: float, lo: float, hi: float) -> float:
    sd = math.sqrt(var)
    return _normal_cdf((hi - mean) / sd) - _normal_cdf((lo - mean) / sd)


def _truncated_gaussian_array(
    mean: float, var: float, lo: float, hi: float, rng: np.random.Generator, count: int
) -> np.ndarray:
    """Rejection-sample `count` draws from N(mean, var) conditioned on [lo, hi]."""
    if not lo < hi:
        raise DataError("truncation interval must satisfy lo < hi")
    if var <= 0:
        raise DataError("variance must be > 0")
    if _acceptance_probability(mean, var, lo, hi) < _MIN_ACCEPTANCE:
        raise DataError(
            f"pathological truncation: acceptance probability below {_MIN_ACCEPTANCE} "
            f"for N({mean}, {var}) on [{lo}, {hi}]"
        )
    sd = math.sqrt(var)
    out = np.empty(count)
    filled = 0
    while filled < count:
        draws = rng.normal(mean, sd, size=count - filled)
        kept = draws[(draws >= lo) & (draws <= hi)]
        out[filled : filled + kept.size] = kept
        filled += kept.size
    return out


def truncated_gaussian(
    mean: float, var: float, lo: float, hi: float, rng: np.random.Generator
) -> float:
    """One rejection-sampled draw from N(mean, var) conditioned on [lo, hi]."""
    return float(_truncated_gaussian_array(mean, var, lo, hi, rng, 1)[0])


@dataclass(frozen=True)
class LinearPanelData:
    """Generated panel/target pair with the latent slopes and parameters retained."""

    panel: DonorPanel
    target: TargetSeries
    theta: np.ndarray
    theta0: float
    spec: LatentModelSpec


def generate_linear_panel_detailed(
    n: int,
    t0: int,
    T: int,
    spec: Optional[LatentModelSpec] = None,
    seed: SeedLike = 0,
    theta0_from_donor_mean: bool = False,
) -> LinearPanelData:
    """Generate the linear-trend panel, keeping slopes and parameters.

    Draw order (fixed for reproducibility): donor slopes, target slope, panel
    noise, target noise. The target slope comes from ``spec.target_theta``
    when set, from the donor-slope mean when ``theta0_from_donor_mean`` (which
    makes the target exactly representable by uniform donor weights in the
    noiseless case), and otherwise from an independent draw of the same
    truncated Gaussian.
    """
    if not 1 <= t0 < T:
        raise DataError(f"need 1 <= t0 < T; got t0={t0}, T={T}")
    if n < 1:
        raise DataError("n must be >= 1")
    spec = spec if spec is not None else LatentModelSpec()
    rng = _as_rng(seed)

    theta = _truncated_gaussian_array(
        spec.theta_mean, spec.theta_var, spec.theta_lo, spec.theta_hi, rng, n
    )
    if spec.target_theta is not None:
        theta0 = float(spec.target_theta)
    elif theta0_from_donor_mean:
        theta0 = float(theta.mean())
    else:
        theta0 = truncated_gaussian(
            spec.theta_mean, spec.theta_var, spec.theta_lo, spec.theta_hi, rng
        )

    times = np.arange(1, T + 1, dtype=np.float64)
    M = np.outer(theta, times)
    m = theta0 * times

    if spec.noise_var > 0:
        s = spec.noise_support
        Z = _truncated_gaussian_array(0.0, spec.noise_var, -s, s, rng, n * T).reshape(n, T)
        z = _truncated_gaussian_array(0.0, spec.noise_var, -s, s, rng, T)
    else:
        Z = np.zeros((n, T))
        z = np.zeros(T)

    panel = DonorPanel(values=M + Z, t0=t0, truth=PanelTruth(M, Z))
    target = TargetSeries(values=m + z, t0=t0, truth=TargetTruth(m, z))
    return LinearPanelData(panel=panel, target=target, theta=theta, theta0=theta0, spec=spec)


def generate_linear_panel(
    n: int,
    t0: int,
    T: int,
    spec: Optional[LatentModelSpec] = None,
    seed: SeedLike = 0,
    theta0_from_donor_mean: bool = False,
) -> tuple[DonorPanel, TargetSeries]:
    """Generate a linear-trend panel/target pair (see the detailed variant)."""
    data = generate_linear_panel_detailed(n, t0, T, spec, seed, theta0_from_donor_mean)
    return data.panel, data.target


def generate_bounded_panel(n: int, t0: int, T: int, seed: SeedLike = 0) -> DonorPanel:
    """Panel with i.i.d. uniform entries in [-1, 1]; always bounded."""
    if not 1 <= t0 < T:
        raise DataError(f"need 1 <= t0 < T; got t0={t0}, T={T}")
    rng = _as_rng(seed)
    return DonorPanel(values=rng.uniform(-1.0, 1.0, size=(n, T)), t0=t0)


def generate_bounded_target(t0: int, T: int, seed: SeedLike = 0) -> TargetSeries:
    """Target with i.i.d. uniform entries in [-1, 1]."""
    rng = _as_rng(seed)
    return TargetSeries(values=rng.uniform(-1.0, 1.0, size=T), t0=t0)
