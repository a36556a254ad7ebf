"""Closed-form vertical ridge regression and projection: the non-private baseline.

The fit minimizes

    (1/t0) * ||y_pre - X_pre^T f||^2 + (lam / (2 t0)) * ||f||^2

whose stationarity condition is the SPD system
``(2 X_pre X_pre^T + lam I) f = 2 X_pre y_pre``; the effective regularizer on
the Gram matrix is therefore lam / 2. The system is solved by direct Cholesky
factorization (n is small at the intended scale), never iteratively.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from .model import DonorPanel, TargetSeries, split

__all__ = [
    "FitResult",
    "RankDeficiencyError",
    "ridge_fit",
    "ridge_gradient",
    "project",
    "sc_fit_predict",
    "solve_regularized_system",
]

METHOD_NONPRIVATE = "nonprivate"
METHOD_OUTPUT = "output_perturbed"
METHOD_OBJECTIVE = "objective_perturbed"

_GRADIENT_TOL = 1e-8


class RankDeficiencyError(np.linalg.LinAlgError):
    """The unregularized Gram system is numerically singular."""


@dataclass(frozen=True)
class FitResult:
    """Coefficient vector with its regularizer, method tag, and noise metadata."""

    coeffs: np.ndarray
    lam: float
    method: str = METHOD_NONPRIVATE
    noise_meta: Optional[object] = None

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=np.float64)
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("fit coefficients must be finite")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)
        if self.method == METHOD_NONPRIVATE and self.noise_meta is not None:
            raise ValueError("a nonprivate fit carries no noise metadata")


def solve_regularized_system(
    X_pre: np.ndarray, rhs: np.ndarray, ridge_term: float
) -> np.ndarray:
    """Solve (2 X X^T + ridge_term I) f = rhs by Cholesky factorization.

    With ridge_term = 0 the system may be singular; in that case the error
    names the donor dimension most aligned with the null space.
    """
    X_pre = np.asarray(X_pre, dtype=np.float64)
    n = X_pre.shape[0]
    A = 2.0 * (X_pre @ X_pre.T) + ridge_term * np.eye(n)
    try:
        c, low = scipy.linalg.cho_factor(A, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        eigvals, eigvecs = np.linalg.eigh(A)
        rank = int(np.sum(eigvals > eigvals[-1] * n * np.finfo(np.float64).eps))
        offending = int(np.argmax(np.abs(eigvecs[:, 0])))
        raise RankDeficiencyError(
            f"gram system is rank deficient (rank {rank} < {n}); "
            f"donor dimension {offending} spans the null space"
        ) from exc
    return scipy.linalg.cho_solve((c, low), rhs, check_finite=False)


def ridge_gradient(
    X_pre: np.ndarray, y_pre: np.ndarray, lam: float, coeffs: np.ndarray
) -> np.ndarray:
    """Analytic gradient of the regularized quadratic loss at ``coeffs``."""
    X_pre = np.asarray(X_pre, dtype=np.float64)
    y_pre = np.asarray(y_pre, dtype=np.float64)
    t0 = X_pre.shape[1]
    return (2.0 / t0) * (X_pre @ (X_pre.T @ coeffs) - X_pre @ y_pre) + (lam / t0) * coeffs


def ridge_fit(X_pre: np.ndarray, y_pre: np.ndarray, lam: float) -> FitResult:
    """Closed-form ridge coefficients for the vertical regression.

    Requires lam > 0, or lam = 0 with a numerically nonsingular Gram matrix
    (every privacy guarantee downstream needs lam > 0; the lam = 0 path exists
    for baselines and tests).
    """
    X_pre = np.asarray(X_pre, dtype=np.float64)
    y_pre = np.asarray(y_pre, dtype=np.float64)
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    if X_pre.ndim != 2 or y_pre.ndim != 1 or X_pre.shape[1] != y_pre.shape[0]:
        raise ValueError(
            f"shape mismatch: X_pre {X_pre.shape} vs y_pre {y_pre.shape}"
        )
    coeffs = solve_regularized_system(X_pre, 2.0 * (X_pre @ y_pre), lam)
    grad_norm = float(np.linalg.norm(ridge_gradient(X_pre, y_pre, lam, coeffs)))
    if grad_norm > _GRADIENT_TOL * (1.0 + float(np.linalg.norm(coeffs))):
        raise np.linalg.LinAlgError(
            f"ridge solve failed stationarity: |grad| = {grad_norm:.3e}"
        )
    return FitResult(coeffs=coeffs, lam=float(lam))


def project(X_post: np.ndarray, fit: FitResult) -> np.ndarray:
    """Predict the post-period target as X_post^T f."""
    X_post = np.asarray(X_post, dtype=np.float64)
    if X_post.ndim != 2 or X_post.shape[0] != fit.coeffs.shape[0]:
        raise ValueError(
            f"projection shape mismatch: X_post {X_post.shape} vs coeffs "
            f"{fit.coeffs.shape}"
        )
    return X_post.T @ fit.coeffs


def sc_fit_predict(
    panel: DonorPanel, target: TargetSeries, lam: float
) -> tuple[FitResult, np.ndarray]:
    """Split, fit on the pre period, and project the post period."""
    if target.T != panel.T or target.t0 != panel.t0:
        raise ValueError("panel and target disagree on (T, t0)")
    X_pre, X_post = split(panel)
    fit = ridge_fit(X_pre, target.y_pre, lam)
    return fit, project(X_post, fit)
