"""Exceptions raised by divaudit"""

from __future__ import annotations

from typing import Any, Optional


class DivergenceError(Exception):
    """Base class for all divaudit errors"""

    pass


class DomainError(DivergenceError, ValueError):
    """Raised when an argument lies outside the domain of an operation"""

    pass


class NotDifferentiableError(DomainError):
    """Raised when a derivative is requested at a point where it does not exist"""

    pass


class NumericalError(DivergenceError, RuntimeError):
    """Raised when a numerical routine fails to reach its tolerance.

    The ``diagnostics`` mapping carries whatever the routine knew at the time
    of failure (error estimates, evaluation counts, the offending parameters).
    """

    def __init__(self, message: str, diagnostics: Optional[dict[str, Any]] = None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})

    def __str__(self) -> str:
        base = super().__str__()
        if not self.diagnostics:
            return base
        details = ", ".join(f"{k}={v!r}" for k, v in self.diagnostics.items())
        return f"{base} ({details})"


class SearchFailure(DivergenceError, RuntimeError):
    """Raised when a violation search finds no margin above the floor"""

    def __init__(self, message: str, max_margin: float, t_at_max: float):
        super().__init__(message)
        self.max_margin = max_margin
        self.t_at_max = t_at_max
