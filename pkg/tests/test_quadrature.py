"""Composite Gauss-Legendre rules and kernel row integrals."""
import math

import numpy as np
import pytest

from greenbvp.errors import InputError, QuadratureError
from greenbvp.kernel import GreenKernel
from greenbvp.params import ProblemParams
from greenbvp.quadrature import QuadratureRule, integrate, integrate_kernel_row


def test_rule_invariants():
    rule = QuadratureRule(panels=16, nodes_per_panel=8, split_points=(0.3,))
    nodes, weights = rule.nodes_weights()
    assert len(nodes) == 16 * 8
    assert abs(weights.sum() - 1.0) < 1e-14
    assert np.all((nodes >= 0) & (nodes <= 1))
    # the split point separates two panel families
    assert not np.any(np.isclose(nodes, 0.3, atol=1e-15))
    with pytest.raises(InputError):
        QuadratureRule(panels=0)
    with pytest.raises(InputError):
        QuadratureRule(split_points=(1.5,))


def test_with_split_dedup_and_bounds():
    rule = QuadratureRule(split_points=(0.5,))
    assert rule.with_split(0.5).split_points == (0.5,)
    assert rule.with_split(0.0).split_points == (0.5,)
    assert rule.with_split(0.25).split_points == (0.25, 0.5)


def test_integrate_basics():
    rule = QuadratureRule()
    assert integrate(lambda s: np.ones_like(s), rule) == pytest.approx(1.0, abs=1e-15)
    assert integrate(lambda s: s, rule) == pytest.approx(0.5, abs=1e-15)
    assert integrate(lambda s: np.sin(math.pi * s), rule) == pytest.approx(
        2.0 / math.pi, abs=1e-14)
    # scalar-only integrands are handled too
    assert integrate(lambda s: float(s) ** 2, rule) == pytest.approx(1 / 3, abs=1e-14)


def test_integrate_nonfinite_raises_with_node():
    rule = QuadratureRule(panels=4)
    with pytest.raises(QuadratureError) as exc:
        integrate(lambda s: np.where(s < 0.5, 1.0, np.inf), rule)
    assert exc.value.node is not None and exc.value.node >= 0.5


def test_kernel_row_closed_forms():
    # sigma = 1, gamma = 0, lam = 1: u(t) = -t^2/2 + 2t/3 from direct integration
    k = GreenKernel(ProblemParams(0.0, 1.0))
    val = integrate_kernel_row(k, 0.5, lambda s: np.ones_like(s))
    assert val == pytest.approx(5.0 / 24.0, abs=1e-13)
    assert integrate_kernel_row(k, 0.0, lambda s: np.ones_like(s)) == 0.0

    # gamma = 1, lam = 0: u = cos t + B sin t - 1 with B = (1 - cos 1)/sin 1
    k2 = GreenKernel(ProblemParams(1.0, 0.0))
    B = (1 - math.cos(1)) / math.sin(1)
    want = math.cos(0.5) + B * math.sin(0.5) - 1.0
    assert integrate_kernel_row(k2, 0.5, lambda s: np.ones_like(s)) == pytest.approx(
        want, abs=1e-13)


def test_kink_handling():
    k = GreenKernel(ProblemParams(0.0, 0.0))
    for t in np.arange(0.1, 0.95, 0.1):
        val = integrate_kernel_row(k, t, lambda s: np.ones_like(s))
        assert abs(val - t * (1 - t) / 2) < 1e-12


def test_halving_convergence():
    # oscillatory target keeps the error above the floor for a few doublings
    exact = (1 - math.cos(40.0)) / 40.0
    errs = []
    for panels in (2, 4, 8, 16):
        rule = QuadratureRule(panels=panels, nodes_per_panel=8)
        errs.append(abs(integrate(lambda s: np.sin(40.0 * s), rule) - exact))
    for a, b in zip(errs, errs[1:]):
        if a < 1e-12:
            break
        assert a / b >= 10.0
