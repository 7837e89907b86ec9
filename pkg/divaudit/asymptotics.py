"""
Numerical checks of the t -> 0 limits behind the non-metric constructions.

Each sweep evaluates a ratio on a decreasing grid of t, fits ``ratio ~ L + c t``
through the three smallest t and reports L with an error bar.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any, Optional, Sequence

import numpy as np

from .cauchy import h, h_double_prime, h_prime
from .distributions import binary_point
from .divergences import jsd
from .exceptions import DomainError, NumericalError
from .generator import GeneratorBase, generator_tv

logger = logging.getLogger(__name__)

DEFAULT_GRID = (1e-1, 3e-2, 1e-2, 3e-3, 1e-3)
DEFAULT_TOLERANCE = 1e-3
H2_TOLERANCE = 1e-4

_FIT_POINTS = 3


@dataclass(frozen=True)
class LimitEstimate:
    """Extrapolated t -> 0 limit of a sampled ratio.

    ``samples`` are (t, ratio) pairs in decreasing t. ``passed`` compares the
    estimate with ``expected`` at ``tolerance``.
    """

    target_name: str
    samples: tuple[tuple[float, float], ...]
    estimate: float
    error_bar: float
    expected: Optional[float] = None
    tolerance: float = DEFAULT_TOLERANCE

    @property
    def passed(self) -> bool:
        if self.expected is None:
            return math.isfinite(self.estimate)
        return abs(self.estimate - self.expected) <= self.tolerance

    def to_json(self) -> dict[str, Any]:
        return {
            "target": self.target_name,
            "samples": [list(s) for s in self.samples],
            "estimate": self.estimate,
            "error_bar": self.error_bar,
            "expected": self.expected,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def default_grid(floor: float = 1e-3) -> list[float]:
    """1e-1, 3e-2, 1e-2, 3e-3, ... down to ``floor``"""
    if not (0 < floor <= 0.1):
        raise DomainError(f"floor must lie in (0, 0.1]; got {floor!r}")
    ts, k = [], 1
    while True:
        for t in (10.0**-k, 3 * 10.0 ** -(k + 1)):
            if t < floor * (1 - 1e-9):
                return ts
            ts.append(t)
        k += 1


def _check_grid(ts: Sequence[float], upper: float = math.inf) -> list[float]:
    ts = sorted((float(t) for t in ts), reverse=True)
    if not ts:
        raise DomainError("the t grid must not be empty")
    if not all(0 < t < upper for t in ts):
        raise DomainError(f"every t must lie in (0, {upper}); got {ts!r}")
    return ts


def extrapolate(
    target_name: str,
    samples: Sequence[tuple[float, float]],
    expected: Optional[float] = None,
    tolerance: float = DEFAULT_TOLERANCE,
) -> LimitEstimate:
    """Least-squares line through the three smallest t, evaluated at t = 0.

    The error bar is the largest distance of those three ratios from the
    intercept. With one sample the estimate is that ratio and the bar is 0.
    """
    samples = tuple(sorted(((float(t), float(r)) for t, r in samples), reverse=True))
    if not samples:
        raise DomainError("need at least one sample")
    tail = samples[-_FIT_POINTS:]
    t = np.array([s[0] for s in tail])
    r = np.array([s[1] for s in tail])
    if len(tail) == 1:
        estimate = float(r[0])
    else:
        _, estimate = np.polyfit(t, r, 1)
        estimate = float(estimate)
    if not math.isfinite(estimate):
        raise NumericalError(f"non-finite limit estimate for {target_name}", diagnostics={"samples": samples})
    error_bar = float(np.max(np.abs(r - estimate)))

    est = LimitEstimate(target_name, samples, estimate, error_bar, expected, tolerance)
    logger.info(
        "%s -> %.12g +/- %.3g (expected %s, %s)",
        target_name,
        estimate,
        error_bar,
        expected,
        "pass" if est.passed else "FAIL",
    )
    return est


# ------------------------------------------------------------------------------------------------
# Binary Jensen-Shannon family
# ------------------------------------------------------------------------------------------------
def jsd_f(t: float, base: float = 2.0) -> float:
    """f(t) = JSD(P_{1/2-t} : P_{1/2+t})"""
    return float(jsd(binary_point(0.5 - t), binary_point(0.5 + t), base=base))


def jsd_g(t: float, base: float = 2.0) -> float:
    """g(t) = JSD(P_{1/2-t} : P_{1/2})"""
    return float(jsd(binary_point(0.5 - t), binary_point(0.5), base=base))


def jsd_f_prime(t: float, base: float = 2.0) -> float:
    """f'(t) = -d/dt H(P_{1/2+t}) = log((1+2t)/(1-2t))"""
    return 2 * math.atanh(2 * t) / math.log(base)


def jsd_g_prime(t: float, base: float = 2.0) -> float:
    """g'(t) = log((1+2t)/(1-2t))/2 - log((1+t)/(1-t))/2"""
    return (math.atanh(2 * t) - math.atanh(t)) / math.log(base)


def jsd_derivative_ratio(t: float) -> float:
    """2 g'(t)/f'(t) = 1 - log((1+t)/(1-t)) / log((1+2t)/(1-2t)); base-free"""
    return 1 - math.atanh(t) / math.atanh(2 * t)


def jsd_fg_sweep(
    ts: Sequence[float] = DEFAULT_GRID, base: float = 2.0, tolerance: float = DEFAULT_TOLERANCE
) -> tuple[LimitEstimate, LimitEstimate]:
    """Limits of g/f (expected 1/4) and 2g'/f' (expected 1/2) as t -> 0"""
    ts = _check_grid(ts, upper=0.5)
    gf = [(t, jsd_g(t, base) / jsd_f(t, base)) for t in ts]
    dd = [(t, jsd_derivative_ratio(t)) for t in ts]
    return (
        extrapolate("g/f", gf, expected=0.25, tolerance=tolerance),
        extrapolate("2g'/f'", dd, expected=0.5, tolerance=tolerance),
    )


def eq1_margin(alpha: float, t: float) -> float:
    """(g/f)^(1-alpha) - 2g'/f'; tends to 4^(alpha-1) - 1/2 as t -> 0"""
    if not (0 < t < 0.5):
        raise DomainError(f"t must lie in (0, 1/2); got {t!r}")
    if not alpha > 0:
        raise DomainError(f"alpha must be positive; got {alpha!r}")
    return (jsd_g(t) / jsd_f(t)) ** (1 - alpha) - jsd_derivative_ratio(t)


# ------------------------------------------------------------------------------------------------
# Cauchy scale family
# ------------------------------------------------------------------------------------------------
def _require_smooth(gen: GeneratorBase) -> None:
    if not gen.smooth_at_1:
        raise DomainError(f"generator {gen.name!r} is not C^2 around 1")
    if not gen.curvature_at_1 > 0:
        raise DomainError(f"generator {gen.name!r} needs f''(1) > 0; got {gen.curvature_at_1!r}")


def cauchy_h_ratio_sweep(
    gen: GeneratorBase, ts: Sequence[float] = DEFAULT_GRID, tolerance: float = DEFAULT_TOLERANCE
) -> tuple[LimitEstimate, LimitEstimate, LimitEstimate]:
    """h(2t)/h(t), 2h'(2t)/h'(t) and 4h''(2t)/h''(t); all tend to 4 for a smooth generator"""
    _require_smooth(gen)
    ts = _check_grid(ts)
    r0 = [(t, h(gen, 2 * t) / h(gen, t)) for t in ts]
    r1 = [(t, 2 * h_prime(gen, 2 * t) / h_prime(gen, t)) for t in ts]
    r2 = [(t, 4 * h_double_prime(gen, 2 * t) / h_double_prime(gen, t)) for t in ts]
    name = gen.name
    return (
        extrapolate(f"h(2t)/h(t) [{name}]", r0, expected=4.0, tolerance=tolerance),
        extrapolate(f"2h'(2t)/h'(t) [{name}]", r1, expected=4.0, tolerance=tolerance),
        extrapolate(f"4h''(2t)/h''(t) [{name}]", r2, expected=4.0, tolerance=tolerance),
    )


def cauchy_tv_ratio_sweep(
    ts: Sequence[float] = DEFAULT_GRID, tolerance: float = DEFAULT_TOLERANCE
) -> tuple[LimitEstimate, LimitEstimate]:
    """h(2t)/h(t) -> 2 and h'(t) -> 1/pi for the total variation generator"""
    gen = generator_tv()
    ts = _check_grid(ts)
    ratio = [(t, h(gen, 2 * t) / h(gen, t)) for t in ts]
    slope = [(t, h_prime(gen, t)) for t in ts]
    return (
        extrapolate("h(2t)/h(t) [tv]", ratio, expected=2.0, tolerance=tolerance),
        extrapolate("h'(t) [tv]", slope, expected=1 / math.pi, tolerance=tolerance),
    )


def cauchy_h2_limit(
    gen: GeneratorBase, ts: Sequence[float] = DEFAULT_GRID, tolerance: float = H2_TOLERANCE
) -> LimitEstimate:
    """h''(t) as t -> 0, expected f''(1)/2"""
    _require_smooth(gen)
    ts = _check_grid(ts)
    samples = [(t, h_double_prime(gen, t)) for t in ts]
    return extrapolate(f"h''(t) [{gen.name}]", samples, expected=gen.curvature_at_1 / 2, tolerance=tolerance)
