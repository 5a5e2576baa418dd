"""Kernel evaluation: literal-formula oracle, examples, jump, invariants."""
import math

import numpy as np
import pytest

from greenbvp.errors import InputError, ResonanceError
from greenbvp.kernel import (GreenKernel, ResonanceReport, check_resonance,
                             green_dt, green_eval, resonance_curve)
from greenbvp.params import ProblemParams, Regime, classify_gamma
from greenbvp.quadrature import QuadratureRule, integrate


# -- literal two-branch formulas, used as an independent oracle ------------

def literal_zero(lam, t, s):
    e = 2.0 - lam
    g1 = (t * (1 - s) * (2 - lam + lam * s) - (2 - lam) * (t - s)) / e
    g2 = t * (1 - s) * (2 - lam + lam * s) / e
    return np.where(s <= t, g1, g2)


def literal_pos(m, lam, t, s):
    sm, cm = math.sin(m), math.cos(m)
    d = m * sm - lam * (1 - cm)
    den = m * sm * d
    g1 = (np.sin(m * s) * (np.sin(m - m * t) * d + lam * np.sin(m * t))
          + lam * np.sin(m * t) * (np.sin(m - m * s) - sm)) / den
    g2 = np.sin(m * t) * (np.sin(m - m * s) * (m * sm + lam * cm)
                          + lam * (np.sin(m * s) - sm)) / den
    return np.where(s <= t, g1, g2)


def literal_neg(m, lam, t, s):
    sh, ch = math.sinh(m), math.cosh(m)
    db = m * sh + lam * (1 - ch)
    den = m * sh * db
    g1 = (np.sinh(m * s) * (np.sinh(m - m * t) * db - lam * np.sinh(m * t))
          - lam * np.sinh(m * t) * (np.sinh(m - m * s) - sh)) / den
    g2 = np.sinh(m * t) * (np.sinh(m - m * s) * (m * sh - lam * ch)
                           - lam * (np.sinh(m * s) - sh)) / den
    return np.where(s <= t, g1, g2)


def test_classify_gamma():
    assert classify_gamma(0.0) == (Regime.ZERO, 0.0)
    assert classify_gamma(4.0) == (Regime.POSITIVE, 2.0)
    assert classify_gamma(-1.0) == (Regime.NEGATIVE, 1.0)
    with pytest.raises(InputError):
        classify_gamma(float("nan"))
    with pytest.raises(InputError):
        classify_gamma(float("inf"))


def test_params_regime_and_m():
    p = ProblemParams(-9.0, 1.5)
    assert p.regime is Regime.NEGATIVE
    assert p.m == 3.0
    assert p.m ** 2 == abs(p.gamma)


def test_check_resonance_examples():
    rep = check_resonance(ProblemParams(0.0, 2.0), 1e-9)
    assert rep == ResonanceReport(True, "lambda_curve", None, 0.0)

    rep = check_resonance(ProblemParams((2 * math.pi) ** 2, 0.7), 1e-9)
    assert rep.resonant and rep.branch == "trig_null_m" and rep.k == 1

    # sin(1)/(1 - cos(1)) = 1.8304877...; the probe value sits 2.8e-7 away
    rep = check_resonance(ProblemParams(1.0, 1.830488), 1e-5)
    assert rep.resonant and rep.branch == "lambda_curve"
    assert abs(rep.distance - abs(1.830488 - math.sin(1) / (1 - math.cos(1)))) < 1e-12

    rep = check_resonance(ProblemParams(1.0, 1.0), 1e-9)
    assert not rep.resonant and rep.branch == "none" and rep.k is None
    with pytest.raises(InputError):
        check_resonance(ProblemParams(1.0, 1.0), 0.0)


def test_resonance_curve_matches_textbook_ratios():
    for m in [0.3, 1.0, 2.5, 3.0, 4.7, 6.0]:
        assert resonance_curve(m * m) == pytest.approx(
            m * math.sin(m) / (1 - math.cos(m)), rel=1e-12)
        assert resonance_curve(-m * m) == pytest.approx(
            m * math.sinh(m) / (math.cosh(m) - 1), rel=1e-12)
    assert resonance_curve(0.0) == 2.0


def test_green_eval_spec_examples():
    k = GreenKernel(ProblemParams(0.0, 1.0))
    assert green_eval(k, 0.25, 0.5) == pytest.approx(0.1875, abs=1e-15)
    assert green_eval(k, 0.75, 0.5) == pytest.approx(0.3125, abs=1e-15)
    assert green_eval(k, 0.3, 1.0) == 0.0

    k2 = GreenKernel(ProblemParams(-1.0, 0.0))
    want = math.sinh(0.5) ** 2 / math.sinh(1.0)
    assert green_eval(k2, 0.5, 0.5) == pytest.approx(want, rel=1e-14)


def test_matches_literal_formulas():
    rng = np.random.default_rng(7)
    t = rng.uniform(0, 1, 500)
    s = rng.uniform(0, 1, 500)
    for lam in [0.0, 0.5, 1.9, 3.0, -1.0]:
        k = GreenKernel(ProblemParams(0.0, lam))
        assert np.max(np.abs(k.eval(t, s) - literal_zero(lam, t, s))) < 1e-13
    for gamma, lam in [(1.0, 0.5), (9.5, 0.05), (0.25, 1.5), (50.0, -2.0)]:
        k = GreenKernel(ProblemParams(gamma, lam))
        m = math.sqrt(gamma)
        assert np.max(np.abs(k.eval(t, s) - literal_pos(m, lam, t, s))) < 1e-12
    for gamma, lam in [(-1.0, 0.5), (-25.0, 2.0), (-0.25, 1.5), (-100.0, 3.0)]:
        k = GreenKernel(ProblemParams(gamma, lam))
        m = math.sqrt(-gamma)
        assert np.max(np.abs(k.eval(t, s) - literal_neg(m, lam, t, s))) < 1e-12


def test_resonance_refusal():
    with pytest.raises(ResonanceError) as exc:
        GreenKernel(ProblemParams(0.0, 2.0))
    assert exc.value.report is not None and exc.value.report.resonant
    with pytest.raises(ResonanceError):
        GreenKernel(ProblemParams((2 * math.pi) ** 2, 1.3))


def test_green_dt_examples_and_jump():
    k = GreenKernel(ProblemParams(0.0, 0.0))
    assert green_dt(k, 0.5, 0.5, "left") == pytest.approx(0.5, abs=1e-15)
    assert green_dt(k, 0.5, 0.5, "right") == pytest.approx(-0.5, abs=1e-15)
    with pytest.raises(InputError):
        green_dt(k, 0.5, 0.5, "up")

    ss = np.linspace(0.1, 0.9, 9)
    for gamma, lam in [(0.0, 1.0), (4.0, 1.3), (-9.0, 2.0), (9.5, 0.05),
                       (math.pi ** 2, 0.7), (-25.0, 1.0)]:
        k = GreenKernel(ProblemParams(gamma, lam))
        jump = k.dt(ss, ss, "right") - k.dt(ss, ss, "left")
        assert np.max(np.abs(jump + 1.0)) < 1e-8


def test_dt_matches_finite_differences_off_diagonal():
    rng = np.random.default_rng(3)
    h = 1e-6
    for gamma, lam in [(0.0, 1.2), (6.0, 0.4), (-12.0, 2.0)]:
        k = GreenKernel(ProblemParams(gamma, lam))
        for _ in range(20):
            t = rng.uniform(0.05, 0.95)
            s = rng.uniform(0.05, 0.95)
            if abs(t - s) < 0.01:
                continue
            fd = (k.eval(t + h, s) - k.eval(t - h, s)) / (2 * h)
            assert k.dt(t, s) == pytest.approx(fd, abs=5e-9, rel=1e-6)


def test_boundary_annihilation():
    pts = np.linspace(0.0, 1.0, 37)
    for gamma, lam in [(0.0, 1.3), (7.0, 0.5), (-16.0, 2.0), (math.pi ** 2, 0.8)]:
        k = GreenKernel(ProblemParams(gamma, lam))
        assert np.max(np.abs(k.eval(0.0, pts))) < 1e-14
        assert np.max(np.abs(k.eval(pts, 0.0))) < 1e-14
        assert np.max(np.abs(k.eval(pts, 1.0))) < 1e-14


def test_ode_residual_in_t():
    h = 1e-4
    tg = np.linspace(0.05, 0.95, 19)
    for gamma, lam in [(0.0, 0.7), (4.0, 1.1), (-9.0, 1.5)]:
        k = GreenKernel(ProblemParams(gamma, lam))
        for s in (0.3, 0.62):
            ts = tg[np.abs(tg - s) > 0.02]
            resid = (k.eval(ts - h, s) - 2 * k.eval(ts, s) + k.eval(ts + h, s)) / h**2 \
                + gamma * k.eval(ts, s)
            assert np.max(np.abs(resid)) < 1e-5


def test_boundary_functional_in_t():
    # the kernel itself satisfies G(1,s) = lam * int_0^1 G(tau,s) dtau
    for gamma, lam in [(0.0, 1.5), (5.0, 0.8), (-4.0, 2.2)]:
        k = GreenKernel(ProblemParams(gamma, lam))
        for s in (0.2, 0.5, 0.77):
            rule = QuadratureRule(split_points=(s,))
            total = integrate(lambda tau: k.eval(tau, s), rule)
            assert abs(k.eval(1.0, s) - lam * total) < 1e-13


def test_continuity_by_dense_sampling():
    rng = np.random.default_rng(11)
    for gamma, lam in [(0.0, 1.0), (8.0, 0.3), (-20.0, 1.0)]:
        k = GreenKernel(ProblemParams(gamma, lam))
        t = rng.uniform(0, 1, 300)
        s = rng.uniform(0, 1, 300)
        d = 1e-7 * rng.choice([-1.0, 1.0], size=300)
        t2 = np.clip(t + d, 0, 1)
        s2 = np.clip(s + np.roll(d, 1), 0, 1)
        assert np.max(np.abs(k.eval(t2, s2) - k.eval(t, s))) < 1e-5


def test_degenerate_branch_consistency():
    lam = 1.0
    kd = GreenKernel(ProblemParams(math.pi ** 2, lam))
    assert kd._degenerate_k == 1
    tt, ss = np.meshgrid(np.linspace(0, 1, 41), np.linspace(0, 1, 41))
    for dm in (1e-4, -1e-4):
        kg = GreenKernel(ProblemParams((math.pi + dm) ** 2, lam))
        assert kg._degenerate_k is None
        assert np.max(np.abs(kg.eval(tt, ss) - kd.eval(tt, ss))) < 1e-3


def test_degenerate_branch_near_lambda_zero_is_refused():
    with pytest.raises(ResonanceError):
        GreenKernel(ProblemParams(math.pi ** 2, 1e-8))


def test_eval_shapes():
    k = GreenKernel(ProblemParams(2.0, 0.4))
    assert isinstance(k.eval(0.3, 0.7), float)
    out = k.eval(np.linspace(0, 1, 5)[:, None], np.linspace(0, 1, 7)[None, :])
    assert out.shape == (5, 7)


def test_eval_rejects_points_outside_the_square():
    k = GreenKernel(ProblemParams(2.0, 0.4))
    with pytest.raises(InputError):
        k.eval(1.2, 0.5)
    with pytest.raises(InputError):
        k.eval(0.5, -0.1)
