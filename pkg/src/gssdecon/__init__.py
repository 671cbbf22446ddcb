"""GSS density deconvolution from measurement-error-contaminated samples.

Estimates a density of the form (2/omega) f0((x-xi)/omega) pi((x-xi)/omega)
from data W = X + U with a known error law: a smoothed characteristic
function estimator for the skewing function pi, GMM for (xi, omega) with
multi-solution selection, two bandwidth selectors, a nonparametric
deconvolution baseline, and a simulation harness.
"""

from ._backend import backend_name
from .bandwidth import (
    BandwidthSearch,
    cv_score,
    minimize_bandwidth,
    mise_approx,
    mise_exact,
    plugin_bandwidth,
    select_bandwidth,
)
from .distributions import ErrorModel, SymmetricBase, cf_base, cf_error, even_moment_error
from .estimator import DeconvFit, NonparFit, SelectionRecord, gss_fit, ise, np_fit, skew_corrected, skew_hat
from .gmm import GmmSolution, MomentSpec, d_objective, gmm_solve, sigma_matrix, t_mean, t_stat
from .gss import (
    GssModel,
    SkewingFunction,
    constant_skew,
    gss_pdf,
    gss_sample,
    implied_cf,
    implied_moments,
    model_variance,
    probit_cubic_skew,
    probit_skew,
    tabulated_skew,
)
from .harness import SimConfig, SimResult, run_selection_tables, run_table1, run_table2, summarize
from .ingestion import harmonize_pairs, replicate_average
from .selection import (
    empirical_skewness_x,
    implied_skewness,
    phase_distance,
    phase_select,
    run_pipeline,
    skewness_select,
)
from .spectral import (
    DEFAULT_KERNEL,
    TAPERED_KERNEL,
    FrequencyGrid,
    SmoothingKernelCF,
    SpectralEstimate,
    estimate_spectrum,
    gauss_legendre_grid,
    phase_empirical,
    quad_integrate,
    s0_empirical,
    s0_smoothed,
    s2_hat,
)

__version__ = "0.1.0"

__all__ = [
    "BandwidthSearch",
    "DEFAULT_KERNEL",
    "TAPERED_KERNEL",
    "DeconvFit",
    "ErrorModel",
    "FrequencyGrid",
    "GmmSolution",
    "GssModel",
    "MomentSpec",
    "NonparFit",
    "SelectionRecord",
    "SimConfig",
    "SimResult",
    "SkewingFunction",
    "SmoothingKernelCF",
    "SpectralEstimate",
    "SymmetricBase",
    "backend_name",
    "cf_base",
    "cf_error",
    "constant_skew",
    "cv_score",
    "d_objective",
    "empirical_skewness_x",
    "estimate_spectrum",
    "even_moment_error",
    "gauss_legendre_grid",
    "gmm_solve",
    "gss_fit",
    "gss_pdf",
    "gss_sample",
    "implied_cf",
    "implied_moments",
    "implied_skewness",
    "ise",
    "minimize_bandwidth",
    "mise_approx",
    "mise_exact",
    "model_variance",
    "np_fit",
    "phase_distance",
    "phase_empirical",
    "phase_select",
    "plugin_bandwidth",
    "probit_cubic_skew",
    "probit_skew",
    "quad_integrate",
    "run_pipeline",
    "run_selection_tables",
    "run_table1",
    "run_table2",
    "s0_empirical",
    "s0_smoothed",
    "s2_hat",
    "select_bandwidth",
    "sigma_matrix",
    "skew_corrected",
    "skew_hat",
    "skewness_select",
    "summarize",
    "t_mean",
    "t_stat",
    "tabulated_skew",
    "harmonize_pairs",
    "replicate_average",
]
