"""Parameter record for the nonlocal boundary value problem.

The linear part of the equation is u'' + gamma*u + sigma = 0 on (0, 1) with
u(0) = 0 and the integral condition u(1) = lam * int_0^1 u(s) ds.  The sign
of gamma selects which closed-form branch applies everywhere else in the
package, so it is classified once here and carried around frozen.

This module is deliberately free of any Green's function machinery: the
finite-difference oracle imports it and must stay structurally independent
of the kernel code.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import InputError


class Regime(enum.Enum):
    ZERO = "zero"
    POSITIVE = "positive"
    NEGATIVE = "negative"


def classify_gamma(gamma: float) -> tuple[Regime, float]:
    """Classify gamma by sign and return (regime, m) with m = sqrt(|gamma|)."""
    gamma = float(gamma)
    if not math.isfinite(gamma):
        raise InputError(f"gamma must be finite, got {gamma!r}")
    if gamma == 0.0:
        return Regime.ZERO, 0.0
    if gamma > 0.0:
        return Regime.POSITIVE, math.sqrt(gamma)
    return Regime.NEGATIVE, math.sqrt(-gamma)


@dataclass(frozen=True)
class ProblemParams:
    """The pair (gamma, lam) plus the derived regime classification."""

    gamma: float
    lam: float

    def __post_init__(self):
        if not math.isfinite(self.gamma):
            raise InputError(f"gamma must be finite, got {self.gamma!r}")
        if not math.isfinite(self.lam):
            raise InputError(f"lambda must be finite, got {self.lam!r}")
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "lam", float(self.lam))

    @property
    def regime(self) -> Regime:
        return classify_gamma(self.gamma)[0]

    @property
    def m(self) -> float:
        """sqrt(|gamma|); zero in the gamma = 0 regime."""
        return classify_gamma(self.gamma)[1]
