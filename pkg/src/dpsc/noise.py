"""Sensitivity formulas, calibrated noise samplers, and the neighboring-pair probe.

The high-dimensional Laplace sampler follows the density
``p(v; a) proportional to exp(-||v||_2 / a)``: uniform direction on the unit
sphere, radius Gamma(shape=dim, scale=a). Its mean norm is therefore
``dim * a``, not ``a``. Samplers take an explicit Generator and never touch
global state; for a fixed scale the draw order (direction first, radius
second) is part of the determinism contract.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .model import DonorPanel, TargetSeries
from .ridge import ridge_fit

__all__ = [
    "SensitivitySpec",
    "NoiseDraw",
    "sensitivity_ridge_coeffs",
    "sensitivity_post_matrix",
    "sample_highdim_laplace",
    "sample_matrix_laplace",
    "sample_gaussian_vector",
    "coefficient_gap",
    "empirical_sensitivity_probe",
    "rank_one_neighbor_fixture",
    "fixture_expected_coeffs",
]

FAMILY_HIGHDIM_LAPLACE = "highdim_laplace"
FAMILY_GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class SensitivitySpec:
    """Problem dimensions that enter the sensitivity formulas."""

    n: int
    t0: int
    lam: float
    horizon: int = 1

    def __post_init__(self):
        if self.n < 1 or self.t0 < 1 or self.horizon < 1 or self.lam <= 0:
            raise ValueError("n, t0, horizon must be >= 1 and lam > 0")


@dataclass(frozen=True)
class NoiseDraw:
    """A realized noise vector/matrix with its scale, family, and provenance."""

    values: np.ndarray
    scale: float
    family: str
    seed_path: str = ""

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(np.asarray(self.values).ravel()))


def sensitivity_ridge_coeffs(spec: SensitivitySpec) -> float:
    """Worst-case l2 change of the ridge coefficients over one donor-row edit.

    Valid for bounded data (all entries in [-1, 1]); equals
    4 t0 sqrt(8 + n) / lam.
    """
    return 4.0 * spec.t0 * math.sqrt(8.0 + spec.n) / spec.lam


def sensitivity_post_matrix(horizon: int) -> float:
    """Worst-case l2 change of the flattened post-period donor matrix: 2 sqrt(horizon)."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    return 2.0 * math.sqrt(horizon)


def _unit_directions(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    out = rng.standard_normal((count, dim))
    norms = np.linalg.norm(out, axis=1)
    while np.any(norms == 0.0):  # probability-zero guard
        bad = norms == 0.0
        out[bad] = rng.standard_normal((int(bad.sum()), dim))
        norms = np.linalg.norm(out, axis=1)
    return out / norms[:, None]


def sample_highdim_laplace(
    dim: int, scale: float, rng: np.random.Generator, size: Optional[int] = None
):
    """Draw from the spherical Laplace density with the given l2 scale.

    Returns a (dim,) vector, or a (size, dim) matrix of independent draws.
    scale = 0 yields exact zeros without consuming randomness.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if scale < 0:
        raise ValueError("scale must be nonnegative")
    count = 1 if size is None else size
    if scale == 0.0:
        out = np.zeros((count, dim))
    else:
        directions = _unit_directions(rng, count, dim)
        radii = rng.gamma(shape=dim, scale=scale, size=count)
        out = directions * radii[:, None]
    return out[0] if size is None else out


def sample_matrix_laplace(
    n: int, horizon: int, scale: float, rng: np.random.Generator
) -> np.ndarray:
    """Matrix-shaped spherical Laplace draw: flattened vector sampler, reshaped.

    The Frobenius norm of the result follows the Gamma(n * horizon, scale)
    radial law, matching the flattened-l2 calibration.
    """
    return sample_highdim_laplace(n * horizon, scale, rng).reshape(n, horizon)


def sample_gaussian_vector(
    dim: int, stddev: float, rng: np.random.Generator, size: Optional[int] = None
):
    """I.i.d. zero-mean Gaussian coordinates with the given standard deviation."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if stddev < 0:
        raise ValueError("stddev must be nonnegative")
    shape = (dim,) if size is None else (size, dim)
    if stddev == 0.0:
        return np.zeros(shape)
    return rng.normal(0.0, stddev, size=shape)


def coefficient_gap(
    X_pre: np.ndarray, y_pre: np.ndarray, donor: int, new_row: np.ndarray, lam: float
) -> float:
    """l2 distance between ridge fits before and after replacing one donor row."""
    fit = ridge_fit(X_pre, y_pre, lam)
    X_alt = np.array(X_pre, dtype=np.float64)
    X_alt[donor] = new_row
    fit_alt = ridge_fit(X_alt, y_pre, lam)
    return float(np.linalg.norm(fit.coeffs - fit_alt.coeffs))


def empirical_sensitivity_probe(
    n: int, t0: int, lam: float, trials: int, rng: np.random.Generator
) -> float:
    """Max observed coefficient gap over random bounded neighboring pairs.

    Each trial draws a panel and target uniform in [-1, 1], rewrites one
    random donor row with a fresh bounded row, and fits both sides. The
    returned maximum must stay below sensitivity_ridge_coeffs for the same
    (n, t0, lam).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    worst = 0.0
    for _ in range(trials):
        X = rng.uniform(-1.0, 1.0, size=(n, t0))
        y = rng.uniform(-1.0, 1.0, size=t0)
        donor = int(rng.integers(n))
        new_row = rng.uniform(-1.0, 1.0, size=t0)
        worst = max(worst, coefficient_gap(X, y, donor, new_row, lam))
    return worst


def fixture_expected_coeffs(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form ridge coefficients for the rank-one neighbor fixture.

    At effective Gram regularizer 1 (lam = 2), the all-ones-row panel yields
    first coordinate n^2 / (n^2 + 2n - 1) with the rest n / (n^2 + 2n - 1);
    the all-zeros-row neighbor yields 0 and n / (2n - 1).
    """
    d = n * n + 2 * n - 1
    f = np.full(n, n / d)
    f[0] = n * n / d
    f_alt = np.full(n, n / (2 * n - 1))
    f_alt[0] = 0.0
    return f, f_alt


def rank_one_neighbor_fixture(
    n: int,
) -> tuple[DonorPanel, DonorPanel, TargetSeries, np.ndarray, np.ndarray]:
    """Near-degenerate neighboring pair whose coefficient gap grows as sqrt(n).

    t0 = n; the target is all ones; donor row 1 is all ones (neighbor: all
    zeros) and every other donor row is constant 1/n. One post column repeats
    the pre pattern so the panel stays bounded. The expected fits hold at
    lam = 2 (effective Gram regularizer 1).
    """
    if n < 2:
        raise ValueError("fixture needs n >= 2")
    T = n + 1
    base = np.full((n, T), 1.0 / n)
    base[0, :] = 1.0
    neighbor = base.copy()
    neighbor[0, :] = 0.0
    panel = DonorPanel(values=base, t0=n)
    panel_alt = DonorPanel(values=neighbor, t0=n)
    target = TargetSeries(values=np.ones(T), t0=n)
    f, f_alt = fixture_expected_coeffs(n)
    return panel, panel_alt, target, f, f_alt
