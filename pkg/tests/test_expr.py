"""Expression language: grammar, precedence, domain signals, round trips."""
import math

import numpy as np
import pytest

from greenbvp.errors import ExprDomainError, ExprSyntaxError
from greenbvp.expr import parse


def test_basic_eval():
    e = parse("t*u^3 + exp(t*u) - 1")
    assert e.eval(1.0, 0.0) == 0.0
    assert parse("sqrt(u)").eval(0.3, 4.0) == 2.0
    assert parse("u").eval(0.5, 7.0) == 7.0


def test_precedence():
    assert parse("2+3*4^2").eval(0, 0) == 50.0
    assert parse("2^3^2").eval(0, 0) == 512.0
    assert parse("-2^2").eval(0, 0) == -4.0
    assert parse("2^-3").eval(0, 0) == 0.125
    assert parse("6/3/2").eval(0, 0) == 1.0
    assert parse("1-2-3").eval(0, 0) == -4.0


def test_example_one_nonlinearity():
    # fifth root of (u^3 + u) plus log(3t + u) at (1, 1)
    e = parse("(u^3+u)^(1/5) + log(3*t+u)")
    assert e.eval(1.0, 1.0) == pytest.approx(2 ** 0.2 + math.log(4.0), rel=1e-14)


def test_syntax_errors_carry_offsets():
    with pytest.raises(ExprSyntaxError) as exc:
        parse("log(")
    assert exc.value.offset == 4
    with pytest.raises(ExprSyntaxError):
        parse("")
    with pytest.raises(ExprSyntaxError) as exc:
        parse("x + 1")
    assert "unknown identifier" in str(exc.value)
    with pytest.raises(ExprSyntaxError):
        parse("min(1)")
    with pytest.raises(ExprSyntaxError):
        parse("sin(1, 2)")
    with pytest.raises(ExprSyntaxError):
        parse("1 + ")
    with pytest.raises(ExprSyntaxError):
        parse("foo(1)")
    with pytest.raises(ExprSyntaxError):
        parse("(1 + 2")


def test_domain_errors():
    with pytest.raises(ExprDomainError):
        parse("log(3*t+u)").eval(0.0, 0.0)
    with pytest.raises(ExprDomainError):
        parse("sqrt(u)").eval(0.0, -1.0)
    with pytest.raises(ExprDomainError):
        parse("(-2)^0.5").eval(0, 0)
    with pytest.raises(ExprDomainError):
        parse("0^-1").eval(0, 0)
    with pytest.raises(ExprDomainError):
        parse("1/(t-t)").eval(0.3, 0.0)
    with pytest.raises(ExprDomainError):
        parse("exp(u)").eval(0.0, 1e6)


def test_functions():
    assert parse("min(t, u)").eval(0.3, 0.7) == 0.3
    assert parse("max(t, u)").eval(0.3, 0.7) == 0.7
    assert parse("pow(u, 2)").eval(0.0, 3.0) == 9.0
    assert parse("abs(-u)").eval(0.0, 2.5) == 2.5
    assert parse("sinh(u)").eval(0.0, 1.0) == pytest.approx(math.sinh(1.0), rel=1e-15)
    assert parse("cosh(t)").eval(1.0, 0.0) == pytest.approx(math.cosh(1.0), rel=1e-15)


def test_round_trip_pretty_print():
    sources = [
        "t*u^3 + exp(t*u) - 1",
        "-(t+u)^2/3 - 4",
        "min(t, max(u, 0.5))*2",
        "2^3^2",
        "1 - -u",
        "1 - 2 - 3 - u",
        "t/(u+1)/2",
        "sqrt(abs(t - u))",
    ]
    rng = np.random.default_rng(5)
    ts = rng.uniform(0.01, 1.0, 25)
    us = rng.uniform(0.01, 2.0, 25)
    for src in sources:
        e = parse(src)
        e2 = parse(e.pretty())
        assert e2.pretty() == e.pretty()
        np.testing.assert_allclose(e.eval(ts, us), e2.eval(ts, us), rtol=1e-15)


def test_array_broadcast_and_constants():
    e = parse("1")
    out = e.eval(np.array([0.1, 0.2, 0.3]))
    assert out.shape == (3,) and np.all(out == 1.0)
    e2 = parse("t + 0*u")
    out2 = e2.eval(np.array([[0.1], [0.2]]), np.array([[1.0, 2.0]]))
    assert out2.shape == (2, 2)


def test_sigma_expression_without_u():
    e = parse("sin(t)")
    assert e.uses_u is False
    assert e.eval(0.5) == pytest.approx(math.sin(0.5), rel=1e-15)
    with pytest.raises(ExprDomainError):
        parse("u").eval(0.5)  # u required but not supplied


def test_reflection():
    e = parse("t*u^3 + exp(t*u) - 1")
    r = e.reflect_t()
    ts = np.linspace(0, 1, 13)
    us = np.linspace(0, 2, 13)
    np.testing.assert_allclose(r.eval(ts, us), e.eval(1 - ts, us), atol=1e-14)
    rr = r.reflect_t()
    np.testing.assert_allclose(rr.eval(ts, us), e.eval(ts, us), atol=1e-14)
