"""Narrow arithmetic progressions laboratory.

Exact combinatorics of collision indices for systems of linear forms,
singular series and Gallagher averages, smoothly truncated sieve majorants
with correlation checks, random-model width thresholds, and desk-scale
searches for narrow progressions in the primes.
"""

__version__ = "0.1.0"

from .errors import (
    DomainError,
    FormatError,
    NarrowlabError,
    NumericError,
    ResourceError,
    UnsupportedError,
)
from .numtheory import (
    FactorSieve,
    WTrickContext,
    build_factor_sieve,
    load_sieve,
    primorial,
    primorial_context,
    save_sieve,
)
from .cutoff import make_cutoff, norm_residual, sieve_factor
from .linforms import (
    FormPartition,
    LinearForm,
    LinearSystem,
    codim_of_partition,
    first_family,
    lindex,
    lindex_bruteforce,
    min_distinct_on_codim,
    parse_system,
    format_system,
    second_family,
    solution_lattice,
    third_family,
)
from .singular import (
    error_factor,
    gallagher_average,
    singular_series,
)
from .majorant import (
    MajorantTable,
    build_majorant,
    check_minorization,
    default_R,
    lambda_chi_R,
    load_majorant,
    majorant_pair_correlation,
    save_majorant,
)
from .conditions import (
    BoxRegion,
    ExponentPattern,
    WeightModel,
    count_hyperplane_points,
    lfc_average_exact,
    lfc_average_mc,
    random_model_deviation,
    symmetric_box,
    width_threshold_fit,
)
from .aplab import (
    SubsetRule,
    ap_count_report,
    count_aps_with_difference,
    hl_prediction,
    lambda_D,
    narrowness_report,
    prime_signal,
)

__all__ = [
    "__version__",
    "NarrowlabError", "DomainError", "FormatError", "NumericError",
    "ResourceError", "UnsupportedError",
    "FactorSieve", "WTrickContext", "build_factor_sieve", "load_sieve",
    "primorial", "primorial_context", "save_sieve",
    "make_cutoff", "norm_residual", "sieve_factor",
    "LinearForm", "LinearSystem", "FormPartition", "codim_of_partition",
    "first_family", "second_family", "third_family", "lindex",
    "lindex_bruteforce", "min_distinct_on_codim", "solution_lattice",
    "parse_system", "format_system",
    "singular_series", "error_factor", "gallagher_average",
    "MajorantTable", "build_majorant", "check_minorization", "default_R",
    "lambda_chi_R", "load_majorant", "majorant_pair_correlation",
    "save_majorant",
    "BoxRegion", "ExponentPattern", "WeightModel", "count_hyperplane_points",
    "lfc_average_exact", "lfc_average_mc", "random_model_deviation",
    "symmetric_box", "width_threshold_fit",
    "SubsetRule", "ap_count_report", "count_aps_with_difference",
    "hl_prediction", "lambda_D", "narrowness_report", "prime_signal",
]
