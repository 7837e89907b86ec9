"""Adaptive one-dimensional quadrature with error diagnostics"""

from __future__ import annotations

import logging
from typing import Callable, Optional, Sequence

from scipy.integrate import quad

from .exceptions import NumericalError

logger = logging.getLogger(__name__)

# requested accuracy; results are accepted up to the caller's abs_tol
QUAD_EPSABS = 1e-14
QUAD_EPSREL = 1e-12
QUAD_LIMIT = 200


def int1d(
    func: Callable[[float], float],
    a: float,
    b: float,
    abs_tol: float,
    points: Optional[Sequence[float]] = None,
    label: str = "integral",
) -> float:
    """Integrate ``func`` over [a, b] with adaptive Gauss-Kronrod subdivision.

    Args:
        func: Integrand, evaluated only at interior nodes.
        a, b: Finite integration bounds.
        abs_tol: Largest accepted absolute error estimate.
        points: Known kinks of the integrand inside (a, b); used as breakpoints.
        label: Name used in log messages and diagnostics.

    Returns:
        float: The integral.

    Raises:
        NumericalError: If the error estimate exceeds ``abs_tol``.
    """
    points = [p for p in (points or ()) if a < p < b] or None
    result = quad(
        func,
        a,
        b,
        points=points,
        epsabs=QUAD_EPSABS,
        epsrel=QUAD_EPSREL,
        limit=QUAD_LIMIT,
        full_output=1,
    )
    value, abserr, info = result[0], result[1], result[2]
    message = result[3] if len(result) > 3 else None

    if abserr > abs_tol:
        raise NumericalError(
            f"quadrature for {label} did not converge",
            diagnostics={
                "interval": (a, b),
                "value": value,
                "abserr": abserr,
                "abs_tol": abs_tol,
                "neval": info.get("neval"),
                "message": message,
            },
        )
    if message is not None:
        logger.debug("quadrature for %s accepted with status %r (abserr=%.3g)", label, message, abserr)
    return value
