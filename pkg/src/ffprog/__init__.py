"""Finite-field harmonic analysis toolkit for weighted polynomial progressions."""

from .config import DEFAULT_SETTINGS, ToolkitSettings, settings_from_env
from .context_cache import PrimeContextCache, context_for
from .errors import FFProgError
from .experiments import (
    DecayReport,
    DecayTarget,
    FoundConfiguration,
    SuiteReport,
    count_configurations,
    find_configuration,
    scan_decay,
    scan_decay_sync,
    standard_system,
    verify_exact_suite,
    verify_exact_suite_sync,
)
from .ffcore import (
    ConfigurationSystem,
    IntPolynomial,
    PrimeContext,
    RationalFunction,
    check_admissible,
    eval_poly,
    eval_rational,
    linear_independence,
    make_prime_context,
    span_decompose,
)
from .fourier import (
    GridFunction,
    Subspace,
    WeightFunction,
    box_norm,
    box_norm_v,
    directional_fourier,
    directional_spectrum,
    gowers_norm,
    inverse_bound,
    lp_norm,
    mult_derivative,
    u_norm,
)
from .operators import avg_G, counting_lambda, dual_F, l2_discrepancy, main_term, oracle_lambda
from .serialization import CsvReportSerializer, JsonReportSerializer, Serializer
from .weights import (
    UniformityProfile,
    WeightSpec,
    realize_weight,
    uniformity_profile,
    uniformity_profile_sync,
)

__all__ = [
    "ConfigurationSystem",
    "CsvReportSerializer",
    "DEFAULT_SETTINGS",
    "DecayReport",
    "DecayTarget",
    "FFProgError",
    "FoundConfiguration",
    "GridFunction",
    "IntPolynomial",
    "JsonReportSerializer",
    "PrimeContext",
    "PrimeContextCache",
    "RationalFunction",
    "Serializer",
    "Subspace",
    "SuiteReport",
    "ToolkitSettings",
    "UniformityProfile",
    "WeightFunction",
    "WeightSpec",
    "avg_G",
    "box_norm",
    "box_norm_v",
    "check_admissible",
    "context_for",
    "count_configurations",
    "counting_lambda",
    "directional_fourier",
    "directional_spectrum",
    "dual_F",
    "eval_poly",
    "eval_rational",
    "find_configuration",
    "gowers_norm",
    "inverse_bound",
    "l2_discrepancy",
    "linear_independence",
    "lp_norm",
    "main_term",
    "make_prime_context",
    "mult_derivative",
    "oracle_lambda",
    "realize_weight",
    "scan_decay",
    "scan_decay_sync",
    "settings_from_env",
    "span_decompose",
    "standard_system",
    "u_norm",
    "uniformity_profile",
    "uniformity_profile_sync",
    "verify_exact_suite",
    "verify_exact_suite_sync",
]
