"""Exception types shared across the package."""
from __future__ import annotations


class GreenBVPError(Exception):
    """Base class for all package errors."""


class InputError(GreenBVPError):
    """Invalid argument values (non-finite numbers, bad grids, bad flags)."""


class DomainError(GreenBVPError):
    """A quantity was requested outside its mathematical domain."""


class ResonanceError(GreenBVPError):
    """The parameter pair sits on (or too close to) the resonant set.

    Carries the ResonanceReport that triggered the refusal when available.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class QuadratureError(GreenBVPError):
    """Integrand returned a non-finite value; `node` holds the location."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class DegenerateConeError(GreenBVPError):
    """Cone constants requested at lambda = 0 where G(1, s) vanishes."""


class ClassificationError(GreenBVPError):
    """Cone constants requested for a kernel that is not of constant sign."""


class SearchFailureError(GreenBVPError):
    """No nontrivial fixed point was found; carries the best residual seen."""

    def __init__(self, message, best_residual=None):
        super().__init__(message)
        self.best_residual = best_residual


class ExprError(GreenBVPError):
    """Base class for expression language errors."""


class ExprSyntaxError(ExprError):
    def __init__(self, message, offset, expected=()):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset
        self.expected = tuple(expected)


class ExprDomainError(ExprError):
    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (sub-expression at offset {offset})"
        super().__init__(message)
        self.offset = offset
