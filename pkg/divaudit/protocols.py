"""
Pair-measure protocol.

PairMeasure is the contract ``random_audit`` needs from a divergence: any
callable taking two multinomials and returning a non-negative value (a float
or a DivergenceValue).
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Protocol, Union, runtime_checkable

if TYPE_CHECKING:
    from .distributions import Multinomial
    from .divergences import DivergenceValue


@runtime_checkable
class PairMeasure(Protocol):
    """Protocol for divergences between two points of the same simplex"""

    def __call__(self, P: Multinomial, Q: Multinomial) -> Union[float, DivergenceValue]: ...
