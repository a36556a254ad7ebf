"""Theoretical RMSE bound calculators for overlaying theory on empirical sweeps.

The bound formulas use the nominal noise norms (coefficient scale ``a`` and
matrix scale ``b``) as expected-noise terms. The spherical Laplace sampler's
true mean norm is dim * scale, so these curves understate realized noise in
dimensions above one; they are kept in the printed nominal form so the theory
columns are comparable across runs. All calculators are pure functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .mechanisms import beta_gaussian, beta_laplace, compute_branch, default_c

__all__ = [
    "BoundInputs",
    "expected_coeff_noise_norm",
    "expected_matrix_noise_norm",
    "expected_coeff_gap",
    "rmse_bound_nonprivate",
    "rmse_bound_output",
    "rmse_bound_output_closed_form",
    "rmse_bound_objective",
    "rmse_bound_objective_closed_form",
    "expected_objective_noise_norm",
    "privacy_cost_output_terms",
    "privacy_cost_output",
]


@dataclass(frozen=True)
class BoundInputs:
    """Inputs shared by the bound calculators.

    ``m_post_norm`` is the spectral norm of the post-period signal matrix;
    when None the bounded-data fallback sqrt(n * (T - t0)) applies.
    ``f_gap`` is the expected coefficient estimation error; when None the
    closed-form ``expected_coeff_gap`` expression is substituted. ``psi``
    bounds the max-abs entry of the fitted coefficients.
    """

    n: int
    t0: int
    T: int
    lam: float
    eps1: float
    eps2: float
    delta: float = 0.0
    sigma2: float = 0.1
    s: float = 1.0
    psi: float = 1.0
    m_post_norm: Optional[float] = None
    f_gap: Optional[float] = None
    xi: float = 0.5
    t_conf: float = 1.0
    k: int = 1
    c: Optional[float] = None
    eps0: Optional[float] = None
    delta_reg: Optional[float] = None

    def __post_init__(self):
        if not (0.0 < self.xi < 1.0):
            raise ValueError("xi must lie in (0, 1)")
        if self.t_conf < 1.0:
            raise ValueError("t_conf must be >= 1")
        if self.lam <= 0 or self.eps1 <= 0 or self.eps2 <= 0:
            raise ValueError("lam, eps1, eps2 must all be > 0")
        if not (1 <= self.t0 < self.T):
            raise ValueError("need 1 <= t0 < T")

    @property
    def horizon(self) -> int:
        return self.T - self.t0


def expected_coeff_noise_norm(n: int, t0: int, lam: float, eps1: float) -> float:
    """Nominal coefficient-noise norm: the calibrated scale 4 t0 sqrt(8+n)/(lam eps1)."""
    return 4.0 * t0 * math.sqrt(8.0 + n) / (lam * eps1)


def expected_matrix_noise_norm(horizon: int, eps2: float) -> float:
    """Nominal matrix-noise Frobenius norm: the calibrated scale 2 sqrt(horizon)/eps2."""
    return 2.0 * math.sqrt(horizon) / eps2


def expected_coeff_gap(
    n: int, t0: int, lam: float, sigma2: float, s: float, xi: float
) -> float:
    """Closed-form bound on E||f_hat - f||_2 under the low-rank data assumptions."""
    num = (math.sqrt(2.0 * n * sigma2) + math.sqrt(2.0 * n * sigma2 * s * s)) * t0 + lam / (
        2.0 * t0
    )
    den = (1.0 - xi) * t0 + lam / (2.0 * t0)
    return num / den


def _m2_over_sqrt_h(inp: BoundInputs) -> float:
    if inp.m_post_norm is not None:
        return inp.m_post_norm / math.sqrt(inp.horizon)
    return math.sqrt(inp.n)  # ||M_post||_2 <= sqrt(n * horizon) for bounded data


def _f_gap(inp: BoundInputs) -> float:
    if inp.f_gap is not None:
        return inp.f_gap
    return expected_coeff_gap(inp.n, inp.t0, inp.lam, inp.sigma2, inp.s, inp.xi)


def _noise_prefactor(inp: BoundInputs) -> float:
    return math.sqrt(inp.n * inp.sigma2) + math.sqrt(2.0) / inp.eps2


def _sample_size_ok(inp: BoundInputs) -> bool:
    # Condition t0 >= C (t/xi)^2 k log n, reported with C = 1; advisory only.
    return inp.t0 >= (inp.t_conf / inp.xi) ** 2 * inp.k * math.log(inp.n)


def rmse_bound_nonprivate(inp: BoundInputs) -> float:
    """Post-period RMSE bound for the exact (non-private) fit."""
    return _m2_over_sqrt_h(inp) * _f_gap(inp) + math.sqrt(inp.n * inp.sigma2) * math.sqrt(
        inp.n
    ) * inp.psi


def rmse_bound_output(inp: BoundInputs) -> float:
    """Post-period RMSE bound for the output-perturbation estimator."""
    a = expected_coeff_noise_norm(inp.n, inp.t0, inp.lam, inp.eps1)
    return _m2_over_sqrt_h(inp) * (_f_gap(inp) + a) + _noise_prefactor(inp) * (
        math.sqrt(inp.n) * inp.psi + a
    )


def rmse_bound_output_closed_form(inp: BoundInputs) -> tuple[float, bool]:
    """Output-perturbation bound with the distributional substitutions.

    Replaces the coefficient gap by its closed form and the signal term by the
    sqrt(n) prefactor; also reports whether the sample-size condition holds.
    """
    a = expected_coeff_noise_norm(inp.n, inp.t0, inp.lam, inp.eps1)
    gap = expected_coeff_gap(inp.n, inp.t0, inp.lam, inp.sigma2, inp.s, inp.xi)
    value = math.sqrt(inp.n) * (gap + a) + _noise_prefactor(inp) * (
        math.sqrt(inp.n) * inp.psi + a
    )
    return value, _sample_size_ok(inp)


def _resolve_branch(inp: BoundInputs) -> tuple[float, float, float]:
    c = inp.c if inp.c is not None else default_c(inp.n, inp.t0)
    if inp.eps0 is not None and inp.delta_reg is not None:
        return c, inp.eps0, inp.delta_reg
    branch = compute_branch(inp.lam, inp.eps1, c)
    return c, branch.eps0, branch.delta_reg


def expected_objective_noise_norm(
    n: int, t0: int, c: float, eps0: float, delta: float
) -> float:
    """Expected objective-noise norm as used by the objective bound.

    Laplace route (delta = 0): the calibrated scale itself. Gaussian route
    (delta > 0): sqrt(n * beta), the printed form (not beta * sqrt(n)).
    """
    if delta > 0:
        return math.sqrt(n * beta_gaussian(n, t0, eps0, delta))
    return beta_laplace(n, t0, c, eps0)


def _objective_error_term(inp: BoundInputs) -> tuple[float, float, float]:
    c, eps0, delta_reg = _resolve_branch(inp)
    e_b = expected_objective_noise_norm(inp.n, inp.t0, c, eps0, inp.delta)
    term = (2.0 / (inp.lam + delta_reg)) * e_b
    if delta_reg != 0.0:
        term += (1.0 / inp.lam + 1.0 / (inp.lam + delta_reg)) * 2.0 * inp.t0**2 * math.sqrt(
            inp.n
        )
    return term, eps0, delta_reg


def rmse_bound_objective(inp: BoundInputs) -> float:
    """Post-period RMSE bound for the objective-perturbation estimator."""
    term, _, _ = _objective_error_term(inp)
    return _m2_over_sqrt_h(inp) * (_f_gap(inp) + term) + _noise_prefactor(inp) * (
        math.sqrt(inp.n) * inp.psi + term
    )


def rmse_bound_objective_closed_form(inp: BoundInputs) -> tuple[float, bool]:
    """Objective-perturbation bound with the distributional substitutions."""
    term, _, _ = _objective_error_term(inp)
    gap = expected_coeff_gap(inp.n, inp.t0, inp.lam, inp.sigma2, inp.s, inp.xi)
    value = math.sqrt(inp.n) * (gap + term) + _noise_prefactor(inp) * (
        math.sqrt(inp.n) * inp.psi + term
    )
    return value, _sample_size_ok(inp)


def privacy_cost_output_terms(
    n: int, eps: float, sigma2: float = 0.1, psi: float = 1.0
) -> tuple[float, float, float, float]:
    """The four additive RMSE terms privacy induces for output perturbation.

    Evaluated in the reference regime lam = t0 and eps1 = eps2 = eps, with the
    signal prefactor at its bounded-data cap sqrt(n); the t0 dependence then
    cancels out of every term.
    """
    root = math.sqrt(8.0 + n)
    return (
        math.sqrt(n) * 4.0 * root / eps,
        4.0 * math.sqrt((8.0 + n) * n * sigma2) / eps,
        math.sqrt(2.0 * n) * psi / eps,
        4.0 * math.sqrt(2.0 * (8.0 + n)) / (eps * eps),
    )


def privacy_cost_output(
    n: int, eps: float, sigma2: float = 0.1, psi: float = 1.0
) -> tuple[float, bool]:
    """Total privacy-induced RMSE overhead and whether eps >= 1/sqrt(n).

    Below the regime threshold the value is still computed; the flag is a
    warning, not an error.
    """
    if eps <= 0:
        raise ValueError("eps must be > 0")
    value = sum(privacy_cost_output_terms(n, eps, sigma2, psi))
    return value, eps >= 1.0 / math.sqrt(n)
