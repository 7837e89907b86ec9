"""
Divergences between multinomial distributions.

``kl`` and ``jsd`` report bits (base-2 logarithm) unless another base is asked
for; ``tvd`` is the unnormalized L1 distance, so mutually singular pairs are at
distance 2. ``f_divergence_discrete`` stays on the generator's natural-log
scale.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.special import rel_entr

from .distributions import Multinomial, _check_same_size, entropy
from .exceptions import DomainError
from .generator import GeneratorBase

logger = logging.getLogger(__name__)

LN2 = math.log(2.0)

# values in [-NEGATIVE_SLACK, 0) are rounding noise and are reported as 0
NEGATIVE_SLACK = 1e-12

JSD_METHODS = ("pointwise", "entropy", "kl")


@dataclass(frozen=True)
class DivergenceValue:
    """A non-negative, possibly infinite divergence value with its log-base tag"""

    value: float
    base: str = "2"
    measure: str = ""

    def __post_init__(self):
        if math.isnan(self.value) or self.value < 0:
            raise DomainError(f"divergence {self.measure!r} must be non-negative; got {self.value!r}")

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.value)

    def __float__(self) -> float:
        return self.value

    def to_json(self) -> dict:
        # json has no infinity literal
        return {"measure": self.measure, "base": self.base, "value": self.value if self.is_finite else "inf"}


def _base_tag(base: float) -> str:
    if base == 2:
        return "2"
    if base == math.e:
        return "e"
    return repr(float(base))


def _clip(value: float) -> float:
    if -NEGATIVE_SLACK <= value < 0:
        return 0.0
    return value


# ------------------------------------------------------------------------------------------------
# Row kernels (natural log), shared by the scalar API and the random audit
# ------------------------------------------------------------------------------------------------
def _mixture_log_terms(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Elementwise p log(p/m) with m = (p + q)/2, zero where p = 0.

    Near p = q the log is taken with log1p of (p - q)/(p + q), which keeps the
    O((p - q)^2) total free of cancellation.
    """
    s = p + q
    with np.errstate(divide="ignore", invalid="ignore"):
        x = (p - q) / s
        near = np.abs(x) < 0.5
        log_ratio = np.where(near, np.log1p(np.where(near, x, 0.0)), np.log(2 * p / s))
        return np.where(p > 0, p * log_ratio, 0.0)


def jsd_rows(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Jensen-Shannon divergence (nats) along the last axis"""
    total = 0.5 * (_mixture_log_terms(p, q) + _mixture_log_terms(q, p)).sum(axis=-1)
    return np.maximum(total, 0.0)


def kl_rows(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Kullback-Leibler divergence (nats) along the last axis; inf without absolute continuity"""
    return rel_entr(p, q).sum(axis=-1)


def tvd_rows(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    return np.abs(p - q).sum(axis=-1)


# ------------------------------------------------------------------------------------------------
# Public API
# ------------------------------------------------------------------------------------------------
def kl(P: Multinomial, Q: Multinomial, base: float = 2.0) -> DivergenceValue:
    """KL(P:Q) = sum_i p_i log(p_i/q_i); +inf iff some p_i > 0 has q_i = 0"""
    _check_same_size(P, Q)
    value = float(kl_rows(P.p, Q.p)) / math.log(base)
    return DivergenceValue(_clip(value), _base_tag(base), "kl")


def jsd(P: Multinomial, Q: Multinomial, method: str = "pointwise", base: float = 2.0) -> DivergenceValue:
    """Jensen-Shannon divergence, in [0, 1] for base 2.

    Args:
        P, Q: Distributions of the same size; boundary points are allowed.
        method: ``"pointwise"`` sums p log(p/m) + q log(q/m) per coordinate
            (default, symmetric bit-for-bit); ``"entropy"`` evaluates
            H(M) - (H(P) + H(Q))/2; ``"kl"`` evaluates (KL(P:M) + KL(Q:M))/2.
        base: Logarithm base.
    """
    _check_same_size(P, Q)
    if method == "pointwise":
        value = float(jsd_rows(P.p, Q.p)) / math.log(base)
    elif method == "entropy":
        M = P.mixture(Q)
        value = entropy(M, base) - (entropy(P, base) + entropy(Q, base)) / 2
    elif method == "kl":
        m = 0.5 * (P.p + Q.p)
        value = 0.5 * float(kl_rows(P.p, m) + kl_rows(Q.p, m)) / math.log(base)
    else:
        raise DomainError(f"unknown jsd method {method!r}; expected one of {JSD_METHODS}")
    return DivergenceValue(_clip(value), _base_tag(base), "jsd")


def tvd(P: Multinomial, Q: Multinomial) -> DivergenceValue:
    """sum_i |p_i - q_i|, in [0, 2]"""
    _check_same_size(P, Q)
    return DivergenceValue(float(tvd_rows(P.p, Q.p)), "2", "tvd")


def f_divergence_discrete(gen: GeneratorBase, P: Multinomial, Q: Multinomial) -> DivergenceValue:
    """sum_i p_i f(q_i/p_i) on the generator's natural-log scale.

    Coordinates off the common support use the closure of the generator:
    p_i = 0 < q_i contributes q_i * lim f(u)/u, and q_i = 0 < p_i contributes
    p_i * f(0+). Either limit being infinite makes the divergence +inf.
    """
    _check_same_size(P, Q)
    p, q = P.p, Q.p
    both = (p > 0) & (q > 0)
    only_q = (p == 0) & (q > 0)
    only_p = (p > 0) & (q == 0)

    value = float(np.sum(p[both] * gen.eval(q[both] / p[both])))
    if np.any(only_q):
        value = math.inf if math.isinf(gen.slope_at_infinity) else value + gen.slope_at_infinity * q[only_q].sum()
    if np.any(only_p):
        value = math.inf if gen.value_at_zero is None else value + gen.value_at_zero * p[only_p].sum()

    measure = f"f:{gen.name}"
    return DivergenceValue(_clip(value), "e", measure)


MEASURES: dict[str, Callable[[Multinomial, Multinomial], DivergenceValue]] = {
    "kl": kl,
    "jsd": jsd,
    "tvd": tvd,
}

_BATCH_KERNELS: dict[Callable, Callable[[np.ndarray, np.ndarray], np.ndarray]] = {
    kl: lambda p, q: kl_rows(p, q) / LN2,
    jsd: lambda p, q: jsd_rows(p, q) / LN2,
    tvd: tvd_rows,
}


def get_measure(measure_id: str) -> Callable[[Multinomial, Multinomial], DivergenceValue]:
    try:
        return MEASURES[measure_id]
    except KeyError:
        raise DomainError(f"unknown measure {measure_id!r}; expected one of {sorted(MEASURES)}") from None


def batch_kernel(measure: Callable) -> Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]]:
    """Row-vectorised equivalent of a registered measure, in the measure's own units"""
    return _BATCH_KERNELS.get(measure)
