"""divaudit: divergences, metrization audits and limit checks"""

from __future__ import annotations

from .distributions import (
    EMBED_EPS,
    SIMPLEX_TOL,
    Multinomial,
    binary_entropy_derivative,
    binary_point,
    embed,
    entropy,
    make_multinomial,
    random_simplex,
)

from .generator import (
    GeneratorBase,
    # Named generators
    JSGenerator,
    KLGenerator,
    TVGenerator,
    generator_js,
    generator_kl,
    generator_tv,
    get_generator,
    generator_ids,
    # Plugin generator
    PluginGenerator,
)

from .divergences import DivergenceValue, f_divergence_discrete, get_measure, jsd, kl, tvd

from .cauchy import (
    CauchyParams,
    Zeta,
    F_cauchy,
    f_div_cauchy,
    f_div_cauchy_oracle,
    h,
    h_double_prime,
    h_prime,
    kl_closed_form,
    scale_triple,
    sweep,
    tv_closed_form,
    zeta,
)

from .audit import (
    AuditReport,
    SearchConfig,
    TriangleCertificate,
    F_multinomial,
    F_multinomial_grid,
    amplify_certificate,
    find_cauchy_violation,
    find_jsd_violation,
    random_audit,
)

from .asymptotics import (
    DEFAULT_GRID,
    LimitEstimate,
    cauchy_h2_limit,
    cauchy_h_ratio_sweep,
    cauchy_tv_ratio_sweep,
    default_grid,
    eq1_margin,
    extrapolate,
    jsd_fg_sweep,
)

from .exceptions import DivergenceError, DomainError, NotDifferentiableError, NumericalError, SearchFailure
from .protocols import PairMeasure
from .util import Util

__version__ = "0.1.0"

__all__ = [
    # Distributions
    "Multinomial",
    "make_multinomial",
    "binary_point",
    "embed",
    "entropy",
    "binary_entropy_derivative",
    "random_simplex",
    "SIMPLEX_TOL",
    "EMBED_EPS",
    # Generator base class
    "GeneratorBase",
    # Named generators
    "JSGenerator",
    "KLGenerator",
    "TVGenerator",
    "generator_js",
    "generator_kl",
    "generator_tv",
    "get_generator",
    "generator_ids",
    # Plugin generator
    "PluginGenerator",
    # Multinomial divergences
    "DivergenceValue",
    "kl",
    "jsd",
    "tvd",
    "f_divergence_discrete",
    "get_measure",
    # Cauchy divergences
    "CauchyParams",
    "Zeta",
    "zeta",
    "f_div_cauchy",
    "f_div_cauchy_oracle",
    "h",
    "h_prime",
    "h_double_prime",
    "F_cauchy",
    "kl_closed_form",
    "tv_closed_form",
    "scale_triple",
    "sweep",
    # Audits
    "SearchConfig",
    "TriangleCertificate",
    "AuditReport",
    "F_multinomial",
    "F_multinomial_grid",
    "find_jsd_violation",
    "find_cauchy_violation",
    "amplify_certificate",
    "random_audit",
    # Limits
    "LimitEstimate",
    "DEFAULT_GRID",
    "default_grid",
    "extrapolate",
    "jsd_fg_sweep",
    "eq1_margin",
    "cauchy_h_ratio_sweep",
    "cauchy_tv_ratio_sweep",
    "cauchy_h2_limit",
    # Errors
    "DivergenceError",
    "DomainError",
    "NotDifferentiableError",
    "NumericalError",
    "SearchFailure",
    # Protocols and utilities
    "PairMeasure",
    "Util",
    # Metadata
    "__version__",
]
