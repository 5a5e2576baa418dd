"""Positivity frontier, sign classification and cone bound data."""
import math

import numpy as np
import pytest

from greenbvp.errors import (ClassificationError, DegenerateConeError, DomainError,
                             ResonanceError)
from greenbvp.kernel import GreenKernel
from greenbvp.params import ProblemParams
from greenbvp.spectrum import (bound_constants, classify_sign, delta,
                               max_kernel_bound)


def test_delta_examples():
    assert delta(0.0) == 2.0
    assert delta(math.pi ** 2 / 4) == pytest.approx(math.pi / 2, rel=1e-12)
    assert delta(-1.0) == pytest.approx(math.sinh(1) / (math.cosh(1) - 1), rel=1e-12)
    assert delta(math.pi ** 2 - 1e-6) < 1e-2
    with pytest.raises(DomainError):
        delta(math.pi ** 2)
    with pytest.raises(DomainError):
        delta(15.0)


def test_delta_continuity_at_zero():
    assert abs(delta(1e-8) - 2.0) < 1e-6
    assert abs(delta(-1e-8) - 2.0) < 1e-6


def test_delta_equals_textbook_ratios():
    for gamma in np.linspace(-30, 9.8, 57):
        if gamma == 0:
            continue
        m = math.sqrt(abs(gamma))
        if gamma > 0:
            want = m * math.sin(m) / (1 - math.cos(m))
        else:
            want = m * math.sinh(m) / (math.cosh(m) - 1)
        assert delta(gamma) == pytest.approx(want, rel=1e-12)


def test_classify_sign_examples():
    assert classify_sign(ProblemParams(0.0, 1.0)).kind == "positive"
    assert classify_sign(ProblemParams(0.0, 3.0)).kind == "changes_sign"
    assert classify_sign(ProblemParams((math.pi / 2) ** 2, 1.0)).kind == "positive"
    sign = classify_sign(ProblemParams(-1.0, 0.0))
    assert sign.kind == "positive" and sign.lambda_zero_boundary
    with pytest.raises(ResonanceError):
        classify_sign(ProblemParams(0.0, 2.0))


def test_classify_sign_negative_lambda_changes_sign():
    assert classify_sign(ProblemParams(0.0, -0.5)).kind == "changes_sign"
    assert classify_sign(ProblemParams(-4.0, -1.0)).kind == "changes_sign"


def test_classify_sign_numerical_above_pi_squared():
    sign = classify_sign(ProblemParams(12.0, 0.5))
    assert sign.source == "numerical"
    assert sign.kind == "changes_sign"


def test_max_kernel_bound():
    assert max_kernel_bound(ProblemParams(0.0, 0.0)) == 0.25
    assert max_kernel_bound(ProblemParams(0.0, 1.0)) == 0.5
    assert max_kernel_bound(ProblemParams(0.0, 1.9)) == pytest.approx(5.0, rel=1e-12)
    with pytest.raises(DomainError):
        max_kernel_bound(ProblemParams(1.0, 1.0))
    with pytest.raises(DomainError):
        max_kernel_bound(ProblemParams(0.0, 2.5))


def test_gamma_zero_closed_identities():
    s = np.linspace(0.0, 1.0, 501)
    for lam in (0.7, 1.4):
        k = GreenKernel(ProblemParams(0.0, lam))
        g1 = k.eval(1.0, s)
        assert np.max(np.abs((2 - lam) * g1 - lam * s * (1 - s))) < 1e-12
        gss = k.eval(s, s)
        assert np.max(np.abs((2 - lam) * gss - s * (1 - s) * (2 - lam * (1 - s)))) < 1e-12


def test_bound_constants_zero_regime_exact():
    spec = bound_constants(ProblemParams(0.0, 1.0))
    assert spec.exact and spec.constant == 2.0
    t = np.linspace(0, 1, 11)
    assert np.allclose(spec.envelope(t), t)
    assert bound_constants(ProblemParams(0.0, 1.5)).constant == pytest.approx(4 / 3, rel=1e-12)
    # tiny gamma is routed through the exact gamma = 0 path
    assert bound_constants(ProblemParams(1e-9, 1.0)).exact
    assert bound_constants(ProblemParams(-1e-9, 1.0)).exact


def test_bound_constants_errors():
    with pytest.raises(DegenerateConeError):
        bound_constants(ProblemParams(0.0, 0.0))
    with pytest.raises(ClassificationError):
        bound_constants(ProblemParams(0.0, 3.0))


@pytest.mark.parametrize("gamma,lam", [((math.pi / 2) ** 2, 1.0), (-4.0, 1.0)])
def test_bound_constants_sandwich_on_fine_mesh(gamma, lam):
    # brute-force verification mesh, independent of the 201-point build grid
    spec = bound_constants(ProblemParams(gamma, lam), grid_n=201)
    k = GreenKernel(ProblemParams(gamma, lam))
    tv = np.linspace(0, 1, 501)
    sv = np.linspace(0, 1, 501)[1:-1]
    G = k.eval(tv[:, None], sv[None, :])
    G1 = k.eval(1.0, sv)
    h = spec.envelope(tv)
    assert spec.constant >= 1.0
    assert np.max(h[:, None] * G1[None, :] - G) <= 1e-10
    assert np.max(G - spec.constant * G1[None, :]) <= 1e-10
    assert np.all(spec.envelope(np.linspace(0.01, 1, 50)) > 0)
    assert spec.envelope(0.0) == 0.0


def test_frontier_consistency_smoke():
    pts = np.linspace(0.0, 1.0, 103)[1:-1]
    for gamma in (-9.0, -1.0, 0.5, 6.0):
        d = delta(gamma)
        for lam, positive in ((0.5 * d, True), (1.3 * d, False)):
            k = GreenKernel(ProblemParams(gamma, lam))
            vals = k.eval(pts[:, None], pts[None, :])
            if positive:
                assert vals.min() > 0
            else:
                assert vals.min() < -1e-8
            assert classify_sign(ProblemParams(gamma, lam)).positive == positive
