"""Differentially private continual decaying sums via Toeplitz square-root factorizations."""

from .bounds import (
    NormBounds,
    baseline_bounds,
    closed_form_upper,
    gamma2_lower_bound,
    gamma2_upper_bound,
    gammaF_upper_bound,
    gaussian_sensitivity,
    harmonic_sum,
    exp_harmonic_sum,
    norm_bounds,
    relaxed_upper,
    zeta_even,
)
from .decay import DecayFunction, constant, custom, exponential, parse_decay, polynomial, sliding_window
from .errors import (
    ConfigError,
    DecaySumError,
    DimensionError,
    DomainError,
    EmptyInputError,
    NormalizationError,
    SizeGuardError,
    StreamExhaustedError,
)
from .evaluation import (
    ErrorReport,
    coeff_gap_table,
    coefficient_gaps,
    comparison_report,
    run_error_experiment,
    true_decaying_sums,
)
from .mechanisms import (
    FactorizationMechanism,
    GaussianBaselineMechanism,
    PrivacyParams,
    SlidingWindowMechanism,
    make_mechanism,
    mechanism_init,
    mechanism_step,
)
from .series import (
    SqrtSeries,
    bell_polynomial,
    closed_form_coeff,
    coefficients,
    exponential_coeff,
    sqrt_series,
)
from .toeplitz import (
    BlockFactor,
    ToeplitzFactor,
    build_block_factor,
    build_factor,
    reconstruct_mf,
    toeplitz_matvec,
)

__version__ = "0.1.0"
