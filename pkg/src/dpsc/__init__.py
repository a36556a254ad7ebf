"""Differentially private synthetic control.

Non-private ridge synthetic control plus two private variants (output and
objective perturbation), their sensitivity/noise calibration, theoretical
RMSE bound calculators, a synthetic-data generator, and a sweep harness.
"""

__version__ = "0.1.0"

from .bounds import (
    BoundInputs,
    expected_coeff_gap,
    expected_coeff_noise_norm,
    expected_matrix_noise_norm,
    expected_objective_noise_norm,
    privacy_cost_output,
    privacy_cost_output_terms,
    rmse_bound_nonprivate,
    rmse_bound_objective,
    rmse_bound_objective_closed_form,
    rmse_bound_output,
    rmse_bound_output_closed_form,
)
from .datagen import (
    LinearPanelData,
    generate_bounded_panel,
    generate_bounded_target,
    generate_linear_panel,
    generate_linear_panel_detailed,
    truncated_gaussian,
)
from .harness import (
    AggregateRow,
    ConfigError,
    SweepConfig,
    SweepRecord,
    aggregate,
    aggregates_to_csv,
    records_to_csv,
    run_sweep,
    write_sweep,
)
from .mechanisms import (
    BranchResult,
    DpscObjConfig,
    DpscOutConfig,
    DpscResult,
    NoiseMeta,
    beta_gaussian,
    beta_laplace,
    compute_branch,
    default_c,
    dpsc_obj,
    dpsc_out,
)
from .model import (
    BoundsReport,
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
from .noise import (
    NoiseDraw,
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
from .ridge import (
    FitResult,
    RankDeficiencyError,
    project,
    ridge_fit,
    ridge_gradient,
    sc_fit_predict,
)
