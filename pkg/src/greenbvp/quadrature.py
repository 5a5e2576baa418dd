"""Composite Gauss-Legendre quadrature on [0,1] with panel splitting.

The kernel-weighted integrands have a derivative kink along s = t, so the
row integrals always place a panel boundary at s = t; each smooth piece is
then integrated to near machine precision by a handful of Gauss panels.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, QuadratureError

__all__ = ["QuadratureRule", "integrate", "integrate_kernel_row"]

_leggauss_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _leggauss(order: int):
    if order not in _leggauss_cache:
        _leggauss_cache[order] = np.polynomial.legendre.leggauss(order)
    return _leggauss_cache[order]


@dataclass(frozen=True)
class QuadratureRule:
    """panels x nodes_per_panel Gauss-Legendre nodes, split at split_points.

    The panel count stays fixed: the panels are distributed over the
    sub-intervals between split points proportionally to length (each
    sub-interval gets at least one), so the total node count is always
    panels * nodes_per_panel.
    """

    panels: int = 16
    nodes_per_panel: int = 8
    split_points: tuple = ()

    def __post_init__(self):
        if self.panels < 1:
            raise InputError(f"panels must be >= 1, got {self.panels}")
        if self.nodes_per_panel < 1:
            raise InputError(f"nodes_per_panel must be >= 1, got {self.nodes_per_panel}")
        pts = tuple(float(p) for p in self.split_points)
        for p in pts:
            if not (0.0 < p < 1.0):
                raise InputError(f"split points must lie in (0,1), got {p}")
        object.__setattr__(self, "split_points", tuple(sorted(set(pts))))

    def with_split(self, point: float) -> "QuadratureRule":
        """A copy of this rule that also splits at `point` (if interior)."""
        if not (0.0 < point < 1.0):
            return self
        return QuadratureRule(self.panels, self.nodes_per_panel,
                              self.split_points + (float(point),))

    def nodes_weights(self) -> tuple[np.ndarray, np.ndarray]:
        """All nodes and weights on [0,1]; weights sum to 1."""
        bounds = np.array([0.0, *self.split_points, 1.0])
        lengths = np.diff(bounds)
        k = len(lengths)
        if k > self.panels:
            raise InputError(
                f"{k - 1} split points need at least {k} panels, rule has {self.panels}")
        counts = np.maximum(1, np.floor(lengths * self.panels).astype(int))
        while counts.sum() > self.panels:
            counts[np.argmax(counts)] -= 1
        while counts.sum() < self.panels:
            counts[np.argmax(lengths / counts)] += 1
        x0, w0 = _leggauss(self.nodes_per_panel)
        nodes, weights = [], []
        for (a, b), c in zip(zip(bounds[:-1], bounds[1:]), counts):
            edges = np.linspace(a, b, c + 1)
            for lo, hi in zip(edges[:-1], edges[1:]):
                half = 0.5 * (hi - lo)
                nodes.append(half * (x0 + 1.0) + lo)
                weights.append(half * w0)
        return np.concatenate(nodes), np.concatenate(weights)


def integrate(f, rule: QuadratureRule | None = None) -> float:
    """Integral of f over [0,1] with the given (or default) rule."""
    if rule is None:
        rule = QuadratureRule()
    nodes, weights = rule.nodes_weights()
    try:
        vals = np.asarray(f(nodes), dtype=float)
        if vals.shape != nodes.shape:
            raise TypeError
    except (TypeError, ValueError):
        vals = np.array([float(f(x)) for x in nodes])
    if not np.all(np.isfinite(vals)):
        bad = nodes[~np.isfinite(vals)][0]
        raise QuadratureError(f"integrand returned a non-finite value at s={bad!r}", node=bad)
    return float(weights @ vals)


def integrate_kernel_row(kernel, t: float, sigma, rule: QuadratureRule | None = None) -> float:
    """int_0^1 G(t,s) sigma(s) ds with the kink at s = t on a panel boundary.

    sigma may be a plain callable or anything callable on arrays (a
    SolutionProfile works directly).
    """
    if rule is None:
        rule = QuadratureRule()
    rule = rule.with_split(float(t))
    nodes, weights = rule.nodes_weights()
    g = kernel.eval(float(t), nodes)
    try:
        sig = np.asarray(sigma(nodes), dtype=float)
        if sig.shape != nodes.shape:
            raise TypeError
    except (TypeError, ValueError):
        sig = np.array([float(sigma(x)) for x in nodes])
    vals = g * sig
    if not np.all(np.isfinite(vals)):
        bad = nodes[~np.isfinite(vals)][0]
        raise QuadratureError(f"kernel row integrand non-finite at s={bad!r}", node=bad)
    return float(weights @ vals)
