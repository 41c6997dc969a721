import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from gmtransform.errors import EvalDomainError, ExprSyntaxError, GrowthCertificateViolated, UnsupportedOrder
from gmtransform.funcdsl import (Add, Cos, Div, Exp, Log, Mul, Neg, Num, Pow, Sin, Sqrt, Sub, Var,
                                 check_growth, differentiate, evaluate, fmt, parse, simplify,
                                 to_handle)
from gmtransform.mtransform import GrowthBound, MParams, m_transform

X = Var()


class TestParse:
    def test_examples(self):
        assert repr(parse("exp(-x)")) == "Exp(Neg(Var))"
        assert repr(parse("x^2*exp(-x)")) == "Mul(Pow(Var,2),Exp(Neg(Var)))"

    def test_error_offset(self):
        with pytest.raises(ExprSyntaxError) as ei:
            parse("2+*3")
        assert ei.value.offset == 2

    @pytest.mark.parametrize("src", ["", "x+", "exp x", "foo(x)", "(x", "x)", "y", "x^x", "2 3"])
    def test_rejected(self, src):
        with pytest.raises(ExprSyntaxError):
            parse(src)

    def test_precedence(self):
        assert evaluate(parse("2^3^2"), 0.0) == 512
        assert evaluate(parse("-2^2"), 0.0) == -4
        assert evaluate(parse("1-2-3"), 0.0) == -4
        assert evaluate(parse("8/2/2"), 0.0) == 2
        assert evaluate(parse("x^-2"), 2.0) == 0.25

    def test_pi_and_scientific(self):
        assert evaluate(parse("sin(pi/2)"), 0.0) == pytest.approx(1.0)
        assert evaluate(parse("1.5e-3*x"), 2.0) == pytest.approx(3e-3)


class TestEvaluate:
    def test_vectorized(self):
        xs = np.linspace(0.1, 3, 7)
        np.testing.assert_allclose(evaluate(parse("x^2*exp(-x)"), xs), xs ** 2 * np.exp(-xs))

    @pytest.mark.parametrize("src, x", [("log(x)", -1.0), ("sqrt(x)", -1.0), ("1/x", 0.0),
                                        ("x^0.5", -2.0), ("x^-1", 0.0)])
    def test_domain_errors(self, src, x):
        with pytest.raises(EvalDomainError):
            evaluate(parse(src), x)

    def test_complex_principal_branch(self):
        z = -1.0 + 0.0j
        assert evaluate(parse("sqrt(x)"), np.array([z]))[0] == pytest.approx(1j)


class TestDifferentiate:
    def test_exp(self):
        assert fmt(differentiate(parse("exp(-x)"), 1)) == "-exp(-x)"

    def test_sine(self):
        assert fmt(differentiate(parse("sin(x)"), 2)) == "-sin(x)"

    def test_order_limits(self):
        with pytest.raises(UnsupportedOrder):
            differentiate(parse("x"), 5)
        with pytest.raises(ValueError):
            differentiate(parse("x"), -1)
        assert differentiate(parse("x^3"), 0) == parse("x^3")

    def test_fd_random_points(self):
        e = parse("x^2*exp(-x)*cos(3*x)/(1+x)")
        d = differentiate(e, 1)
        rng = np.random.default_rng(7)
        for x in rng.uniform(0.1, 4, 20):
            h = 1e-5 * max(1, x)
            fd = (evaluate(e, x + h) - evaluate(e, x - h)) / (2 * h)
            assert abs(evaluate(d, x) - fd) <= 1e-6 * max(1, abs(fd))

    def test_simplify_folds_constants(self):
        assert simplify(parse("2*3+x*1+0")) == parse("6+x")


# random trees that are total on x in [0.5, 2]
leaves = st.one_of(st.just(X), st.integers(0, 5).map(lambda n: Num(float(n))),
                   st.sampled_from([0.5, 1.5, 2.25]).map(Num))


def _extend(children):
    return st.one_of(
        children.map(Neg),
        st.tuples(children, children).map(lambda t: Add(*t)),
        st.tuples(children, children).map(lambda t: Sub(*t)),
        st.tuples(children, children).map(lambda t: Mul(*t)),
        children.map(lambda c: Div(c, Add(Num(2.0), Cos(c)))),
        st.tuples(children, st.integers(0, 3)).map(lambda t: Pow(t[0], Num(float(t[1])))),
        children.map(Exp), children.map(Sin), children.map(Cos),
        children.map(lambda c: Sqrt(Add(Num(1.0), Mul(c, c)))),
        children.map(lambda c: Log(Add(Num(2.0), Sin(c)))),
    )


trees = st.recursive(leaves, _extend, max_leaves=6)


@given(trees)
def test_print_parse_roundtrip(e):
    assert parse(fmt(e)) == parse(fmt(parse(fmt(e))))
    assert fmt(parse(fmt(e))) == fmt(e)


@given(trees, st.floats(0.5, 2.0))
def test_roundtrip_preserves_value(e, x):
    a = evaluate(e, x)
    assume(math.isfinite(a) and abs(a) < 1e100)
    b = evaluate(parse(fmt(e)), x)
    assert b == pytest.approx(a, rel=1e-12, abs=1e-300)


@given(trees, st.floats(0.5, 2.0))
def test_derivative_matches_fd(e, x):
    with np.errstate(all="ignore"):
        f0 = evaluate(e, x)
        assume(math.isfinite(f0) and abs(f0) < 1e6)
        d = evaluate(differentiate(e, 1), x)
        h = 1e-5
        pts = [evaluate(e, x + k * h) for k in (-2, -1, 1, 2)]
    assume(all(math.isfinite(p) for p in pts) and math.isfinite(d))
    fd = (pts[0] - 8 * pts[1] + 8 * pts[2] - pts[3]) / (12 * h)
    scale = max(1.0, abs(f0), max(abs(p) for p in pts))
    assert abs(d - fd) <= 1e-6 * scale * max(1.0, abs(d))


@given(trees, st.floats(0.5, 2.0))
def test_evaluation_is_pure(e, x):
    a = evaluate(e, x)
    b = evaluate(e, x)
    assert (a == b) or (math.isnan(a) and math.isnan(b))


class TestHandles:
    def test_accepted(self):
        to_handle("exp(-x)", GrowthBound(K=1, beta=1e6, T=0, power=0))
        to_handle("x^2*exp(-x)", GrowthBound(K=1, beta=1e6, T=0, power=2))

    def test_rejected(self):
        with pytest.raises(GrowthCertificateViolated) as ei:
            to_handle("exp(x^2)", GrowthBound(K=10, beta=0.5, T=0, power=3))
        assert ei.value.x > 0

    def test_no_certificate(self):
        h = to_handle("exp(x^2)")
        assert h.growth is None

    def test_derivatives_available(self):
        h = to_handle("sin(x)")
        for k, want in enumerate([math.sin, math.cos, lambda x: -math.sin(x),
                                  lambda x: -math.cos(x), math.sin]):
            assert h.derivative(k)(np.array([0.7]))[0] == pytest.approx(want(0.7), rel=1e-14)

    def test_transform_of_parsed(self):
        h = to_handle("exp(-x)")
        p = MParams(rho=1, m=1, u=1, v=0, omega=1)
        assert m_transform(h, p).value == pytest.approx(0.3613286168882226, rel=1e-12)

    def test_check_growth_respects_T(self):
        e = parse("exp(-x)*x^5")
        with pytest.raises(GrowthCertificateViolated):
            check_growth(e, GrowthBound(K=1, beta=1e6, T=0, power=0))
        check_growth(e, GrowthBound(K=1, beta=1e6, T=50, power=0))
