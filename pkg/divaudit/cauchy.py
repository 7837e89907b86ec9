"""
f-divergences between univariate Cauchy distributions.

Every f-divergence between two Cauchy laws depends on the parameters only
through the invariant

    zeta = 1 + ((mu_2 - mu_1)^2 + (sigma_2 - sigma_1)^2) / (2 sigma_1 sigma_2),

and equals the single integral  int_0^pi f(1/(zeta + sqrt(zeta^2 - 1) cos theta)) dtheta/pi.
``f_div_cauchy`` evaluates that integral; ``f_div_cauchy_oracle`` integrates
the definition over the real line instead and serves as an independent check.

Along the scale family (0, e^-t), (0, 1), (0, e^t) the invariant is cosh t, and
``h``, ``h_prime`` and ``h_double_prime`` evaluate the integral and its first
two t-derivatives with cosh t, sinh t substituted.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.optimize import brentq

from .exceptions import DomainError, NotDifferentiableError, NumericalError
from .generator import GeneratorBase
from .quadrature import int1d

logger = logging.getLogger(__name__)

# accepted quadrature error for the theta integral and for the real-line oracle
QUAD_ABS_TOL = 1e-10
ORACLE_ABS_TOL = 1e-9

# analytic derivative vs finite difference, checked mode only
DERIV_DISCREPANCY_TOL = 1e-5

_RANGE_RTOL = 1e-12
_KINK_SCAN_POINTS = 4097
_PEAK_MAX_WIDTH = 0.5
_PEAK_WIDTH_STEP = 4.0


@dataclass(frozen=True)
class CauchyParams:
    """Location-scale pair of a Cauchy distribution"""

    mu: float
    sigma: float

    def __post_init__(self):
        if not math.isfinite(self.mu):
            raise DomainError(f"mu must be finite; got {self.mu!r}")
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise DomainError(f"sigma must be positive; got {self.sigma!r}")

    def pdf(self, x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        return self.sigma / math.pi / ((np.asarray(x) - self.mu) ** 2 + self.sigma**2)

    def to_json(self) -> list[float]:
        return [self.mu, self.sigma]

    @classmethod
    def from_json(cls, data: Sequence[float]) -> CauchyParams:
        if len(data) != 2:
            raise DomainError(f"expected [mu, sigma]; got {data!r}")
        return cls(float(data[0]), float(data[1]))

    @classmethod
    def parse(cls, text: str) -> CauchyParams:
        """Parse ``"mu,sigma"``"""
        parts = text.split(",")
        if len(parts) != 2:
            raise DomainError(f"expected 'mu,sigma'; got {text!r}")
        try:
            return cls(float(parts[0]), float(parts[1]))
        except ValueError as e:
            raise DomainError(f"expected 'mu,sigma'; got {text!r}") from e


@dataclass(frozen=True)
class Zeta:
    """The invariant zeta >= 1, stored together with zeta - 1 computed without cancellation"""

    value: float
    excess: float

    def __post_init__(self):
        if not (self.excess >= 0 and self.value >= 1):
            raise DomainError(f"zeta must be at least 1; got {self.value!r}")

    @property
    def s(self) -> float:
        """sqrt(zeta^2 - 1)"""
        return math.sqrt(self.excess * (self.excess + 2))

    def __float__(self) -> float:
        return self.value


def zeta(a: CauchyParams, b: CauchyParams) -> Zeta:
    """The maximal invariant of the pair (a, b); symmetric by construction"""
    excess = ((b.mu - a.mu) ** 2 + (b.sigma - a.sigma) ** 2) / (2 * a.sigma * b.sigma)
    return Zeta(1.0 + excess, excess)


# ------------------------------------------------------------------------------------------------
# The theta integral
# ------------------------------------------------------------------------------------------------
def _denominator(theta: Union[float, np.ndarray], excess: float, s: float) -> Union[float, np.ndarray]:
    """zeta + s cos(theta) written as 1/(zeta + s) + 2 s cos(theta/2)^2.

    (zeta - s)(zeta + s) = 1, so the two forms agree; this one has no
    cancellation near theta = pi, where the direct sum drops to 1/(zeta + s).
    """
    return 1.0 / (1.0 + excess + s) + 2 * s * np.cos(theta / 2) ** 2


def _kink_angle(excess: float, s: float) -> float:
    """theta in (0, pi) where the generator argument is 1"""
    # cos(theta/2)^2 = (zeta + s - 1) / (2 s (zeta + s))
    return 2 * math.acos(math.sqrt((excess + s) / (2 * s * (1.0 + excess + s))))


def _peak_breakpoints(excess: float, s: float) -> list[float]:
    """Breakpoints closing in on theta = pi, where the argument peaks at zeta + s.

    The peak has angular width about sqrt(2 / (s (zeta + s))); for large zeta it
    is too narrow for the adaptive rule to find unaided.
    """
    width = math.sqrt(2 / (s * (1.0 + excess + s)))
    points = []
    while width < _PEAK_MAX_WIDTH:
        points.append(math.pi - width)
        width *= _PEAK_WIDTH_STEP
    return points


def _check_argument_range(excess: float, s: float) -> None:
    # the argument 1/(zeta + s cos theta) spans [1/(zeta+s), zeta+s]
    c = 1.0 + excess
    lo, hi = 1.0 / (c + s), c + s
    u = 1.0 / _denominator(np.linspace(0.0, math.pi, 17), excess, s)
    if np.any(u < lo * (1 - _RANGE_RTOL)) or np.any(u > hi * (1 + _RANGE_RTOL)):
        raise NumericalError(
            "generator argument left [zeta - s, zeta + s]",
            diagnostics={"zeta": c, "s": s, "min": float(u.min()), "max": float(u.max())},
        )


def _theta_integral(
    integrand: Callable[[float], float],
    excess: float,
    s: float,
    gen: GeneratorBase,
    abs_tol: float,
    label: str,
) -> float:
    _check_argument_range(excess, s)
    points = _peak_breakpoints(excess, s)
    if not gen.smooth_at_1:
        points.append(_kink_angle(excess, s))
    return int1d(integrand, 0.0, math.pi, abs_tol=abs_tol, points=sorted(points), label=label) / math.pi


def _nonnegative(value: float, label: str) -> float:
    if value < 0:
        if value < -QUAD_ABS_TOL:
            raise NumericalError(f"{label} came out negative", diagnostics={"value": value})
        return 0.0
    return value


def f_div_cauchy(gen: GeneratorBase, a: CauchyParams, b: CauchyParams, abs_tol: float = QUAD_ABS_TOL) -> float:
    """D_f(p_a : p_b) via the closed-form theta integral.

    Depends on (a, b) only through ``zeta(a, b)``, hence is exactly symmetric.
    """
    z = zeta(a, b)
    if z.excess == 0:
        return 0.0
    c, s = z.value, z.s

    def integrand(theta: float) -> float:
        return gen.eval(1.0 / _denominator(theta, z.excess, s))

    value = _theta_integral(integrand, z.excess, s, gen, abs_tol, f"D_{gen.name}(zeta={c!r})")
    return _nonnegative(value, "f_div_cauchy")


def f_div_cauchy_oracle(
    gen: GeneratorBase, a: CauchyParams, b: CauchyParams, abs_tol: float = ORACLE_ABS_TOL
) -> float:
    """D_f(p_a : p_b) by direct integration of f(p_b/p_a) p_a over the real line.

    The substitution x = mu_a + sigma_a tan(u) turns p_a dx into du/pi on
    (-pi/2, pi/2); the density ratio stays bounded away from 0 and inf, so the
    transformed integrand is bounded.
    """
    if a == b:
        return 0.0
    s1, s2, delta = a.sigma, b.sigma, a.mu - b.mu

    def ratio(u):
        return s1 * s2 / ((s1 * np.sin(u) + delta * np.cos(u)) ** 2 + (s2 * np.cos(u)) ** 2)

    def integrand(u: float) -> float:
        return gen.eval(ratio(u))

    points = None if gen.smooth_at_1 else _level_crossings(lambda u: ratio(u) - 1.0, -math.pi / 2, math.pi / 2)
    value = int1d(integrand, -math.pi / 2, math.pi / 2, abs_tol=abs_tol, points=points, label="oracle") / math.pi
    return _nonnegative(value, "f_div_cauchy_oracle")


def _level_crossings(g: Callable, lo: float, hi: float) -> list[float]:
    grid = np.linspace(lo, hi, _KINK_SCAN_POINTS)[1:-1]
    vals = g(grid)
    roots = [float(x) for x, v in zip(grid, vals) if v == 0]
    for i in np.nonzero(vals[:-1] * vals[1:] < 0)[0]:
        roots.append(brentq(g, grid[i], grid[i + 1], xtol=1e-15))
    return sorted(roots)


# ------------------------------------------------------------------------------------------------
# The scale family and its derivatives
# ------------------------------------------------------------------------------------------------
def _check_t(t: float) -> None:
    if not (math.isfinite(t) and t > 0):
        raise DomainError(f"t must be positive; got {t!r}")


def _family(t: float) -> tuple[float, float, float]:
    """(cosh t, sinh t, cosh t - 1) with the last computed as 2 sinh(t/2)^2"""
    return math.cosh(t), math.sinh(t), 2 * math.sinh(t / 2) ** 2


def _family_terms(theta: float, t: float, ch: float, sh: float) -> tuple[float, float]:
    """A = sinh t + cosh t cos theta and B = cosh t + sinh t cos theta, both without cancellation near pi"""
    half = math.cos(theta / 2) ** 2
    return -math.exp(-t) + 2 * ch * half, math.exp(-t) + 2 * sh * half


def h(gen: GeneratorBase, t: float, abs_tol: float = QUAD_ABS_TOL) -> float:
    """D_f between scales e^-t and 1 (equivalently 1 and e^t): the theta integral at zeta = cosh t"""
    _check_t(t)
    ch, sh, excess = _family(t)

    def integrand(theta: float) -> float:
        return gen.eval(1.0 / _denominator(theta, excess, sh))

    return _nonnegative(_theta_integral(integrand, excess, sh, gen, abs_tol, f"h_{gen.name}({t!r})"), "h")


def h_prime(gen: GeneratorBase, t: float, check: bool = False, abs_tol: float = QUAD_ABS_TOL) -> float:
    """dh/dt by differentiating under the integral:

        h'(t) = int_0^pi -A/B^2 f'(1/B) dtheta/pi,  A = sinh t + cosh t cos theta,  B = cosh t + sinh t cos theta

    Falls back to a central difference of ``h`` if f' is unavailable at a node.
    With ``check`` the analytic value is compared against the central difference.
    """
    _check_t(t)
    ch, sh, excess = _family(t)

    def integrand(theta: float) -> float:
        A, B = _family_terms(theta, t, ch, sh)
        return -A / (B * B) * gen.deriv1(1.0 / B)

    try:
        value = _theta_integral(integrand, excess, sh, gen, abs_tol, f"h'_{gen.name}({t!r})")
    except NotDifferentiableError:
        logger.warning("f' of %r unavailable at a quadrature node; using a finite difference of h", gen.name)
        return _fd_first(gen, t)

    if check:
        _compare(value, _fd_first(gen, t), "h'", gen, t)
    return value


def h_double_prime(gen: GeneratorBase, t: float, check: bool = False, abs_tol: float = QUAD_ABS_TOL) -> float:
    """d^2h/dt^2 under the integral sign:

        int_0^pi [A^2/B^4 f''(1/B) + (2A^2 - B^2)/B^3 f'(1/B)] dtheta/pi

    Requires a generator that is C^2 around 1.
    """
    _check_t(t)
    if not gen.smooth_at_1:
        raise DomainError(f"h'' needs a generator that is C^2 around 1; {gen.name!r} is not")
    ch, sh, excess = _family(t)

    def integrand(theta: float) -> float:
        A, B = _family_terms(theta, t, ch, sh)
        u = 1.0 / B
        return (A * A) / B**4 * gen.deriv2(u) + (2 * A * A - B * B) / B**3 * gen.deriv1(u)

    value = _theta_integral(integrand, excess, sh, gen, abs_tol, f"h''_{gen.name}({t!r})")
    if check:
        _compare(value, _fd_second(gen, t), "h''", gen, t)
    return value


def _fd_first(gen: GeneratorBase, t: float) -> float:
    d = min(1e-5, t / 2)
    return (h(gen, t + d) - h(gen, t - d)) / (2 * d)


def _fd_second(gen: GeneratorBase, t: float) -> float:
    d = min(1e-3, t / 2)
    return (h(gen, t + d) - 2 * h(gen, t) + h(gen, t - d)) / (d * d)


def _compare(analytic: float, fd: float, label: str, gen: GeneratorBase, t: float) -> None:
    if abs(analytic - fd) > DERIV_DISCREPANCY_TOL:
        raise NumericalError(
            f"{label} disagrees with its finite difference",
            diagnostics={"generator": gen.name, "t": t, "analytic": analytic, "finite_difference": fd},
        )


def F_cauchy(gen: GeneratorBase, alpha: float, t: float) -> float:
    """h(2t)^alpha - 2 h(t)^alpha; positive values witness a triangle violation on the scale triple"""
    if alpha <= 0:
        raise DomainError(f"alpha must be positive; got {alpha!r}")
    return h(gen, 2 * t) ** alpha - 2 * h(gen, t) ** alpha


# ------------------------------------------------------------------------------------------------
# Closed forms used as oracles
# ------------------------------------------------------------------------------------------------
def kl_closed_form(z: Zeta) -> float:
    """KL between Cauchy laws: log((1 + zeta)/2)"""
    return math.log1p(z.excess / 2)


def tv_closed_form(z: Zeta) -> float:
    """Half-L1 distance between Cauchy laws: (2/pi) arctan(sqrt((zeta - 1)/2))"""
    return 2 / math.pi * math.atan(math.sqrt(z.excess / 2))


def scale_triple(t: float) -> tuple[CauchyParams, CauchyParams, CauchyParams]:
    """((0, e^-t), (0, 1), (0, e^t))"""
    _check_t(t)
    return CauchyParams(0.0, math.exp(-t)), CauchyParams(0.0, 1.0), CauchyParams(0.0, math.exp(t))


@dataclass(frozen=True)
class SweepRow:
    t: float
    h: float
    h_prime: float
    h_double_prime: Optional[float]
    ratio: float


def sweep(gen: GeneratorBase, ts: Sequence[float]) -> list[SweepRow]:
    """Rows (t, h, h', h'', h(2t)/h(t)); h'' is left empty for non-smooth generators"""
    rows = []
    for t in sorted(ts, reverse=True):
        ht = h(gen, t)
        rows.append(
            SweepRow(
                t=t,
                h=ht,
                h_prime=h_prime(gen, t),
                h_double_prime=h_double_prime(gen, t) if gen.smooth_at_1 else None,
                ratio=h(gen, 2 * t) / ht,
            )
        )
    return rows
