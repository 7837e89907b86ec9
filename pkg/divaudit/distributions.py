"""
Finite discrete distributions (points of the probability simplex).

A :class:`Multinomial` is an immutable weight vector that sums to one. Interior
points have every weight strictly positive; boundary points (vertices, faces)
are representable too, because the Jensen-Shannon divergence and the total
variation distance are defined on the closed simplex.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy.special import entr

from .exceptions import DomainError

logger = logging.getLogger(__name__)

# Weights are re-normalized at construction; downstream code may rely on this.
SIMPLEX_TOL = 1e-12

# Default mass put on the padded coordinates by ``embed``.
EMBED_EPS = 1e-9


@dataclass(frozen=True)
class Multinomial:
    """A point of the closed probability simplex.

    Use :func:`make_multinomial` to build one from unnormalized weights; the
    constructor only checks the invariants.
    """

    weights: tuple[float, ...]
    interior: bool

    def __post_init__(self):
        if len(self.weights) < 2:
            raise DomainError(f"a multinomial needs at least 2 weights; got {len(self.weights)}")
        if min(self.weights) < 0:
            raise DomainError(f"weights must be non-negative; got {self.weights!r}")
        total = math.fsum(self.weights)
        if abs(total - 1.0) > SIMPLEX_TOL:
            raise DomainError(f"weights must sum to 1 within {SIMPLEX_TOL}; got sum {total!r}")
        if self.interior != (min(self.weights) > 0):
            raise DomainError("interior flag does not match the weights")

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def p(self) -> np.ndarray:
        """Weights as a fresh float array"""
        return np.asarray(self.weights, dtype=float)

    def mixture(self, other: Multinomial) -> Multinomial:
        """Midpoint (P + Q) / 2"""
        _check_same_size(self, other)
        return make_multinomial(0.5 * (self.p + other.p))

    def to_json(self) -> list[float]:
        return list(self.weights)

    @classmethod
    def from_json(cls, data: Union[str, Sequence[float]]) -> Multinomial:
        """Parse a JSON array (or an already decoded list) with full validation"""
        if isinstance(data, str):
            try:
                data = json.loads(data)
            except json.JSONDecodeError as e:
                raise DomainError(f"not a JSON array of numbers: {data!r}") from e
        if not isinstance(data, (list, tuple)) or not all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in data
        ):
            raise DomainError(f"not a JSON array of numbers: {data!r}")
        return make_multinomial(data)

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    def __len__(self) -> int:
        return self.n


def make_multinomial(weights: Union[Sequence[float], np.ndarray]) -> Multinomial:
    """Normalize non-negative weights onto the simplex.

    Args:
        weights: At least two finite, non-negative numbers with a positive sum.

    Returns:
        Multinomial: The normalized point; ``interior`` is set iff every weight is positive.

    Raises:
        DomainError: On negative, non-finite, too few or all-zero weights.
    """
    arr = np.asarray(weights, dtype=float)
    if arr.ndim != 1 or arr.size < 2:
        raise DomainError(f"a multinomial needs a flat list of at least 2 weights; got {weights!r}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"weights must be finite; got {weights!r}")
    if np.any(arr < 0):
        raise DomainError(f"weights must be non-negative; got {weights!r}")
    peak = arr.max()
    if peak <= 0:
        raise DomainError(f"weights must not all be zero; got {weights!r}")

    # scale first so the sum cannot overflow
    arr = arr / peak
    arr = arr / arr.sum()
    return Multinomial(tuple(float(x) for x in arr), interior=bool(arr.min() > 0))


def binary_point(s: float) -> Multinomial:
    """The binary distribution P_s = (s, 1 - s)"""
    if not (0.0 <= s <= 1.0):
        raise DomainError(f"s must lie in [0, 1]; got {s!r}")
    return make_multinomial([s, 1.0 - s])


def embed(P: Multinomial, n: int, eps: float = EMBED_EPS) -> Multinomial:
    """Lift a binary distribution into the n-simplex.

    Returns the normalization of ``(p_1, p_2, eps, ..., eps)`` with ``n - 2``
    padded coordinates. ``eps = 0`` gives the zero-padded boundary point, which
    is the limit of the interior points as ``eps`` shrinks.
    """
    if P.n != 2:
        raise DomainError(f"embed expects a binary distribution; got size {P.n}")
    if n < 3:
        raise DomainError(f"target size must be at least 3; got {n!r}")
    if eps < 0:
        raise DomainError(f"eps must be non-negative; got {eps!r}")
    if eps > 0 and eps >= min(P.weights) / 2:
        raise DomainError(f"eps must be below min(p_1, p_2)/2 = {min(P.weights) / 2!r}; got {eps!r}")

    return make_multinomial(list(P.weights) + [eps] * (n - 2))


def entropy(P: Multinomial, base: float = 2.0) -> float:
    """Shannon entropy with 0 log 0 = 0, in units of ``log(base)`` (bits by default)"""
    h = float(entr(P.p).sum()) / math.log(base)
    # rounding can push the uniform case a hair past log n
    return min(max(h, 0.0), math.log(P.n) / math.log(base))


def binary_entropy_derivative(s: float, base: float = 2.0) -> float:
    """d/ds H(P_s) = log((1 - s)/s) for 0 < s < 1"""
    if not (0.0 < s < 1.0):
        raise DomainError(f"s must lie in (0, 1); got {s!r}")
    return math.log((1.0 - s) / s) / math.log(base)


def random_simplex(rng: np.random.Generator, n: int, size: int) -> np.ndarray:
    """Draw ``size`` points uniformly from the n-simplex.

    Rows of i.i.d. standard exponentials divided by their sums are uniform
    (Dirichlet(1, ..., 1)) on the simplex.
    """
    if n < 2:
        raise DomainError(f"n must be at least 2; got {n!r}")
    if size < 0:
        raise DomainError(f"size must be non-negative; got {size!r}")
    e = rng.standard_exponential((size, n))
    return e / e.sum(axis=1, keepdims=True)


def _check_same_size(P: Multinomial, Q: Multinomial) -> None:
    if P.n != Q.n:
        raise DomainError(f"dimension mismatch: {P.n} vs {Q.n}")
