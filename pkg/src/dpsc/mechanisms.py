"""Differentially private synthetic control mechanisms.

Two algorithms share the same private projection step and differ in how the
regression coefficients are privatized:

* ``dpsc_out`` (output perturbation): fit exactly, then add a spherical
  Laplace vector calibrated to the coefficient sensitivity.
* ``dpsc_obj`` (objective perturbation): add a linear noise term (and, when
  the learning budget is small, extra regularization) to the objective and
  minimize the perturbed objective exactly in closed form.

Both report total privacy budget (eps1 + eps2, delta) where delta = 0 for
output perturbation. Neither clamps or defaults epsilons; budget-splitting
conventions belong to the caller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .model import DonorPanel, TargetSeries, split, validate_bounds
from .noise import (
    FAMILY_GAUSSIAN,
    FAMILY_HIGHDIM_LAPLACE,
    NoiseDraw,
    SensitivitySpec,
    sample_gaussian_vector,
    sample_highdim_laplace,
    sample_matrix_laplace,
    sensitivity_post_matrix,
    sensitivity_ridge_coeffs,
)
from .ridge import (
    METHOD_OBJECTIVE,
    METHOD_OUTPUT,
    FitResult,
    ridge_fit,
    solve_regularized_system,
)

__all__ = [
    "DpscOutConfig",
    "DpscObjConfig",
    "BranchResult",
    "NoiseMeta",
    "DpscResult",
    "default_c",
    "compute_branch",
    "beta_laplace",
    "beta_gaussian",
    "dpsc_out",
    "dpsc_obj",
]


@dataclass(frozen=True)
class DpscOutConfig:
    """Output-perturbation parameters; eps1 buys the fit, eps2 the projection."""

    lam: float
    eps1: float
    eps2: float
    release_coeffs: bool = False

    def __post_init__(self):
        if self.lam <= 0 or self.eps1 <= 0 or self.eps2 <= 0:
            raise ValueError("lam, eps1, eps2 must all be > 0")


@dataclass(frozen=True)
class DpscObjConfig:
    """Objective-perturbation parameters.

    ``c`` bounds the largest absolute eigenvalue of the Gram-matrix difference
    between neighboring panels; when None it falls back to ``default_c``.
    delta = 0 selects spherical Laplace objective noise, delta > 0 Gaussian.
    """

    lam: float
    eps1: float
    eps2: float
    delta: float = 0.0
    c: Optional[float] = None

    def __post_init__(self):
        if self.lam <= 0 or self.eps1 <= 0 or self.eps2 <= 0:
            raise ValueError("lam, eps1, eps2 must all be > 0")
        if self.delta < 0:
            raise ValueError("delta must be >= 0")
        if self.c is not None and self.c <= 0:
            raise ValueError("c must be > 0")


@dataclass(frozen=True)
class BranchResult:
    """Learning-budget split for objective perturbation.

    ``delta_reg`` is floored at zero (extra regularization cannot be
    negative); ``raw_delta_reg`` preserves the unfloored branch value.
    """

    eps0: float
    delta_reg: float
    raw_delta_reg: float


@dataclass(frozen=True)
class NoiseMeta:
    """Realized noise scales/norms and budget accounting for one mechanism run."""

    method: str
    eps1: float
    eps2: float
    delta: float
    total_epsilon: float
    coeff_scale: float
    coeff_noise_norm: float
    matrix_scale: float
    matrix_noise_norm: float
    coeff_family: str
    bounded_inputs: bool
    seed_path: str = ""
    eps0: Optional[float] = None
    delta_reg: Optional[float] = None
    raw_delta_reg: Optional[float] = None
    c: Optional[float] = None


@dataclass(frozen=True)
class DpscResult:
    """Private prediction with optional coefficient release and noise metadata."""

    prediction: np.ndarray
    fit: Optional[FitResult]
    meta: NoiseMeta


def default_c(n: int, t0: int) -> float:
    """Eigenvalue bound (1 + sqrt(16 n - 15)) * t0 for bounded data.

    The fallback when the analyst knows nothing about the donors beyond
    (n, t0); domain knowledge admits smaller values and less noise.
    """
    if n < 1 or t0 < 1:
        raise ValueError("n and t0 must be >= 1")
    return (1.0 + math.sqrt(16.0 * n - 15.0)) * t0


def compute_branch(lam: float, eps1: float, c: float) -> BranchResult:
    """Split the learning budget between noise-ratio and determinant terms.

    When eps1 clears log(1 + 2c/lam + c^2/lam^2) strictly, no extra
    regularization is needed and the remainder funds the noise; otherwise the
    budget halves and delta_reg = c / (e^(eps1/4) - 1) - lam restores enough
    strong convexity (floored at zero; ties route to this branch).
    """
    if lam <= 0 or eps1 <= 0 or c <= 0:
        raise ValueError("lam, eps1, c must all be > 0")
    threshold = math.log1p(2.0 * c / lam + (c / lam) ** 2)
    if eps1 > threshold:
        return BranchResult(eps0=eps1 - threshold, delta_reg=0.0, raw_delta_reg=0.0)
    raw = c / math.expm1(eps1 / 4.0) - lam
    return BranchResult(eps0=eps1 / 2.0, delta_reg=max(raw, 0.0), raw_delta_reg=raw)


def beta_laplace(n: int, t0: int, c: float, eps0: float) -> float:
    """Laplace objective-noise scale: min of the two sensitivity routes."""
    if eps0 <= 0:
        raise ValueError("eps0 must be > 0")
    return min(
        4.0 * t0 * math.sqrt(8.0 + n) / eps0,
        (c * math.sqrt(n) + 4.0 * t0) / eps0,
    )


def beta_gaussian(n: int, t0: int, eps0: float, delta: float) -> float:
    """Gaussian objective-noise standard deviation for the delta > 0 route."""
    if eps0 <= 0 or delta <= 0:
        raise ValueError("eps0 and delta must be > 0")
    return 4.0 * t0 * math.sqrt(8.0 + n) * math.sqrt(2.0 * math.log(2.0 / delta) + eps0) / eps0


def _check_pairing(panel: DonorPanel, target: TargetSeries):
    if target.T != panel.T or target.t0 != panel.t0:
        raise ValueError("panel and target disagree on (T, t0)")


def _privatize_post(
    X_post: np.ndarray,
    eps2: float,
    rng: np.random.Generator,
    scale_override: Optional[float],
) -> tuple[np.ndarray, NoiseDraw]:
    n, horizon = X_post.shape
    b_scale = sensitivity_post_matrix(horizon) / eps2
    if scale_override is not None:
        b_scale = scale_override
    W = sample_matrix_laplace(n, horizon, b_scale, rng)
    return X_post + W, NoiseDraw(values=W, scale=b_scale, family=FAMILY_HIGHDIM_LAPLACE)


def dpsc_out(
    panel: DonorPanel,
    target: TargetSeries,
    config: DpscOutConfig,
    rng: np.random.Generator,
    _scale_override: Optional[tuple[Optional[float], Optional[float]]] = None,
    seed_path: str = "",
) -> DpscResult:
    """Output perturbation: perturb the exact fit, perturb the post matrix, project.

    Draw order is fixed (coefficient noise, then matrix noise) so a given rng
    stream reproduces bit-identical output. ``_scale_override`` is a test-only
    hook that replaces the calibrated (coefficient, matrix) noise scales; it is
    not reachable from the CLI.
    """
    _check_pairing(panel, target)
    X_pre, X_post = split(panel)
    fit = ridge_fit(X_pre, target.y_pre, config.lam)

    spec = SensitivitySpec(panel.n, panel.t0, config.lam, panel.horizon)
    a_scale = sensitivity_ridge_coeffs(spec) / config.eps1
    a_override, b_override = _scale_override if _scale_override else (None, None)
    if a_override is not None:
        a_scale = a_override
    v = sample_highdim_laplace(panel.n, a_scale, rng)
    coeff_draw = NoiseDraw(values=v, scale=a_scale, family=FAMILY_HIGHDIM_LAPLACE)
    f_out = fit.coeffs + v

    X_tilde, matrix_draw = _privatize_post(X_post, config.eps2, rng, b_override)
    prediction = X_tilde.T @ f_out

    meta = NoiseMeta(
        method=METHOD_OUTPUT,
        eps1=config.eps1,
        eps2=config.eps2,
        delta=0.0,
        total_epsilon=config.eps1 + config.eps2,
        coeff_scale=coeff_draw.scale,
        coeff_noise_norm=coeff_draw.norm,
        matrix_scale=matrix_draw.scale,
        matrix_noise_norm=matrix_draw.norm,
        coeff_family=FAMILY_HIGHDIM_LAPLACE,
        bounded_inputs=validate_bounds(panel, target).bounded,
        seed_path=seed_path,
    )
    released = (
        FitResult(coeffs=f_out, lam=config.lam, method=METHOD_OUTPUT, noise_meta=meta)
        if config.release_coeffs
        else None
    )
    return DpscResult(prediction=prediction, fit=released, meta=meta)


def dpsc_obj(
    panel: DonorPanel,
    target: TargetSeries,
    config: DpscObjConfig,
    rng: np.random.Generator,
    _scale_override: Optional[tuple[Optional[float], Optional[float]]] = None,
    seed_path: str = "",
) -> DpscResult:
    """Objective perturbation: minimize the noise-augmented objective exactly.

    The perturbed objective adds (delta_reg / (2 t0)) ||f||^2 and
    (1/t0) b^T f to the ridge loss; its exact minimizer solves
    (2 X_pre X_pre^T + (lam + delta_reg) I) f = 2 X_pre y_pre - b. The
    projection step matches ``dpsc_out``. Draw order: objective noise b,
    then matrix noise. ``_scale_override`` replaces (b, matrix) noise scales
    for tests only.
    """
    _check_pairing(panel, target)
    X_pre, X_post = split(panel)
    n, t0 = panel.n, panel.t0

    c = config.c if config.c is not None else default_c(n, t0)
    branch = compute_branch(config.lam, config.eps1, c)
    if config.delta > 0:
        beta = beta_gaussian(n, t0, branch.eps0, config.delta)
        family = FAMILY_GAUSSIAN
    else:
        beta = beta_laplace(n, t0, c, branch.eps0)
        family = FAMILY_HIGHDIM_LAPLACE

    beta_override, b_override = _scale_override if _scale_override else (None, None)
    if beta_override is not None:
        beta = beta_override
    if family == FAMILY_GAUSSIAN:
        b_vec = sample_gaussian_vector(n, beta, rng)
    else:
        b_vec = sample_highdim_laplace(n, beta, rng)
    obj_draw = NoiseDraw(values=b_vec, scale=beta, family=family)

    rhs = 2.0 * (X_pre @ target.y_pre) - b_vec
    coeffs = solve_regularized_system(X_pre, rhs, config.lam + branch.delta_reg)

    X_tilde, matrix_draw = _privatize_post(X_post, config.eps2, rng, b_override)
    prediction = X_tilde.T @ coeffs

    meta = NoiseMeta(
        method=METHOD_OBJECTIVE,
        eps1=config.eps1,
        eps2=config.eps2,
        delta=config.delta,
        total_epsilon=config.eps1 + config.eps2,
        coeff_scale=beta,
        coeff_noise_norm=obj_draw.norm,
        matrix_scale=matrix_draw.scale,
        matrix_noise_norm=matrix_draw.norm,
        coeff_family=family,
        bounded_inputs=validate_bounds(panel, target).bounded,
        seed_path=seed_path,
        eps0=branch.eps0,
        delta_reg=branch.delta_reg,
        raw_delta_reg=branch.raw_delta_reg,
        c=c,
    )
    fit = FitResult(coeffs=coeffs, lam=config.lam, method=METHOD_OBJECTIVE, noise_meta=meta)
    return DpscResult(prediction=prediction, fit=fit, meta=meta)
