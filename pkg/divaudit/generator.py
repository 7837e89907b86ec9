"""
Convex generator functions for f-divergences.

Every generator is a bundle of f, f' and f'' on (0, inf) together with the
metadata the divergence code needs at the boundary of the simplex:
``value_at_zero`` (f(0+), ``None`` when infinite) and ``slope_at_infinity``
(lim f(u)/u as u -> inf). All generators here use the natural logarithm.
"""

from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from typing import Callable, Optional, Union

import numpy as np

from .exceptions import DomainError, NotDifferentiableError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# registration checks
_ZERO_AT_ONE_TOL = 1e-14
_CONVEXITY_SLACK = 1e-12
_DERIV_CHECK_POINTS = (0.5, 1.0, 2.0)
_DERIV_CHECK_RTOL = 1e-6
_FD_STEP_1 = 1e-5
_FD_STEP_2 = 1e-4
_PROBE_GRID = np.geomspace(0.1, 10.0, 21)


class GeneratorBase(ABC):
    """Base class for all generators.

    Subclasses implement ``_eval``, ``_deriv1`` and ``_deriv2`` on float
    arrays of strictly positive values; the public methods accept scalars or
    arrays and return the same shape.
    """

    name: str = "generator"
    smooth_at_1: bool = True
    value_at_zero: Optional[float] = None
    slope_at_infinity: float = math.inf

    def __init__(self):
        self.convexity_verified = True
        self._validate()

    @abstractmethod
    def _eval(self, u: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def _deriv1(self, u: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def _deriv2(self, u: np.ndarray) -> np.ndarray: ...

    def eval(self, u: ArrayLike) -> ArrayLike:
        return self._apply(self._eval, u)

    def deriv1(self, u: ArrayLike) -> ArrayLike:
        return self._apply(self._deriv1, u)

    def deriv2(self, u: ArrayLike) -> ArrayLike:
        return self._apply(self._deriv2, u)

    __call__ = eval

    @property
    def defined_at_0(self) -> bool:
        return self.value_at_zero is not None

    @property
    def curvature_at_1(self) -> float:
        """f''(1); raises for generators that are not C^2 around 1"""
        if not self.smooth_at_1:
            raise NotDifferentiableError(f"generator {self.name!r} has no second derivative at u=1")
        return float(self.deriv2(1.0))

    def _apply(self, fn: Callable[[np.ndarray], np.ndarray], u: ArrayLike) -> ArrayLike:
        arr = np.asarray(u, dtype=float)
        if not np.all(arr > 0):
            raise DomainError(f"generator {self.name!r} is defined on (0, inf); got {u!r}")
        out = fn(arr)
        return float(out) if arr.ndim == 0 else out

    def _validate(self) -> None:
        """Registration checks: f(1) = 0, derivative agreement, convexity spot-check"""
        at_one = float(self.eval(1.0))
        if abs(at_one) > _ZERO_AT_ONE_TOL:
            raise DomainError(f"generator {self.name!r} must vanish at 1; got f(1) = {at_one!r}")

        for u in _DERIV_CHECK_POINTS:
            if u == 1.0 and not self.smooth_at_1:
                continue
            fd1 = _central_first(self.eval, u, _FD_STEP_1)
            fd2 = _central_second(self.eval, u, _FD_STEP_2)
            d1 = float(self.deriv1(u))
            d2 = float(self.deriv2(u))
            if not _close(d1, fd1) or not _close(d2, fd2):
                raise DomainError(
                    f"derivatives of generator {self.name!r} disagree with finite differences at u={u}: "
                    f"f'={d1!r} vs {fd1!r}, f''={d2!r} vs {fd2!r}"
                )

        a, b = np.meshgrid(_PROBE_GRID, _PROBE_GRID)
        mid = self.eval((a + b) / 2)
        avg = (self.eval(a) + self.eval(b)) / 2
        if np.any(mid > avg + _CONVEXITY_SLACK):
            self.convexity_verified = False
            logger.warning("generator %r failed the convexity spot-check on [0.1, 10]", self.name)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(name={self.name!r})"


class JSGenerator(GeneratorBase):
    """f_JS(u) = (u log(2u/(1+u)) - log((1+u)/2)) / 2"""

    name = "js"
    smooth_at_1 = True
    value_at_zero = math.log(2.0) / 2
    slope_at_infinity = math.log(2.0) / 2

    def _eval(self, u):
        # log1p keeps the O((u-1)^2) value accurate near u = 1
        return (u * np.log1p((u - 1) / (u + 1)) - np.log1p((u - 1) / 2)) / 2

    def _deriv1(self, u):
        return np.log1p((u - 1) / (u + 1)) / 2

    def _deriv2(self, u):
        return 1 / (2 * u * (1 + u))


class KLGenerator(GeneratorBase):
    """f_KL(u) = -log u, so that D_f(P:Q) = KL(P:Q) under the f(q/p) p convention"""

    name = "kl"
    smooth_at_1 = True
    value_at_zero = None
    slope_at_infinity = 0.0

    def _eval(self, u):
        return -np.log(u)

    def _deriv1(self, u):
        return -1 / u

    def _deriv2(self, u):
        return 1 / (u * u)


class TVGenerator(GeneratorBase):
    """f_TV(u) = |u - 1| / 2; not differentiable at 1"""

    name = "tv"
    smooth_at_1 = False
    value_at_zero = 0.5
    slope_at_infinity = 0.5
    one_sided_deriv1 = (-0.5, 0.5)
    one_sided_deriv2 = (0.0, 0.0)

    def _eval(self, u):
        return np.abs(u - 1) / 2

    def _deriv1(self, u):
        self._check_kink(u)
        return np.sign(u - 1) / 2

    def _deriv2(self, u):
        self._check_kink(u)
        return np.zeros_like(u)

    def _check_kink(self, u: np.ndarray) -> None:
        if np.any(u == 1.0):
            raise NotDifferentiableError(
                f"generator {self.name!r} is not differentiable at u=1 "
                f"(one-sided f' = {self.one_sided_deriv1})"
            )


class PluginGenerator(GeneratorBase):
    """Generator assembled from user hooks.

    Missing derivative hooks fall back to central finite differences. Hooks may
    be scalar-only; they are vectorised with ``np.vectorize``.
    """

    def __init__(
        self,
        name: str,
        eval_hook: Callable[[float], float],
        deriv1_hook: Optional[Callable[[float], float]] = None,
        deriv2_hook: Optional[Callable[[float], float]] = None,
        smooth_at_1: bool = True,
        value_at_zero: Optional[float] = None,
        slope_at_infinity: float = math.inf,
    ):
        self.name = name
        self.smooth_at_1 = smooth_at_1
        self.value_at_zero = value_at_zero
        self.slope_at_infinity = slope_at_infinity
        self._eval_hook = np.vectorize(eval_hook, otypes=[float])
        self._deriv1_hook = np.vectorize(deriv1_hook, otypes=[float]) if deriv1_hook is not None else None
        self._deriv2_hook = np.vectorize(deriv2_hook, otypes=[float]) if deriv2_hook is not None else None
        super().__init__()

    @property
    def has_analytic_derivatives(self) -> bool:
        return self._deriv1_hook is not None and self._deriv2_hook is not None

    def _eval(self, u):
        return self._eval_hook(u)

    def _deriv1(self, u):
        if self._deriv1_hook is not None:
            return self._deriv1_hook(u)
        return _central_first(self._eval_hook, u, _FD_STEP_1)

    def _deriv2(self, u):
        if self._deriv2_hook is not None:
            return self._deriv2_hook(u)
        return _central_second(self._eval_hook, u, _FD_STEP_2)


def generator_js() -> JSGenerator:
    return JSGenerator()


def generator_kl() -> KLGenerator:
    return KLGenerator()


def generator_tv() -> TVGenerator:
    return TVGenerator()


_REGISTRY: dict[str, Callable[[], GeneratorBase]] = {
    "js": generator_js,
    "kl": generator_kl,
    "tv": generator_tv,
}


def get_generator(gen_id: str) -> GeneratorBase:
    """Look up a named generator by its string id ("js", "kl", "tv")"""
    try:
        return _REGISTRY[gen_id]()
    except KeyError:
        raise DomainError(f"unknown generator {gen_id!r}; expected one of {sorted(_REGISTRY)}") from None


def generator_ids() -> list[str]:
    return sorted(_REGISTRY)


def _central_first(f: Callable, u: ArrayLike, step: float) -> ArrayLike:
    h = step * np.maximum(1.0, np.abs(u))
    h = np.minimum(h, np.asarray(u, dtype=float) / 2)
    return (f(u + h) - f(u - h)) / (2 * h)


def _central_second(f: Callable, u: ArrayLike, step: float) -> ArrayLike:
    h = step * np.maximum(1.0, np.abs(u))
    h = np.minimum(h, np.asarray(u, dtype=float) / 2)
    return (f(u + h) - 2 * f(u) + f(u - h)) / (h * h)


def _close(value: float, reference: float) -> bool:
    return abs(value - reference) <= _DERIV_CHECK_RTOL * max(1.0, abs(reference))
