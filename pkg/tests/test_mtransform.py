import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from gmtransform.corpus import CORPUS, exp_decay, gaussian, t_exp, unit
from gmtransform.errors import DivergentTail, DomainError, ExistenceWarning, MissingDerivative
from gmtransform.mtransform import (FuncHandle, GrowthBound, MParams, as_handle, borel_dzrbashjan,
                                    duality_residuals, laplace, log_pow_sum, m_transform,
                                    m_transform_many, mellin, natural, stieltjes, sumudu,
                                    validate_params)
from oracles import E_E1_1, SQRT_PI, rel_err, simpson_richardson


def one(x):
    return np.ones_like(x)


class TestParams:
    def test_flag_is_exact(self):
        assert MParams(v=0).v_exactly_zero
        assert not MParams(v=1e-300).v_exactly_zero

    @pytest.mark.parametrize("kw", [dict(m=0), dict(m=1.5), dict(omega=0), dict(omega=-1), dict(rho=-0.5)])
    def test_rejected(self, kw):
        with pytest.raises(DomainError):
            MParams(**kw)

    def test_growth_bound_validation(self):
        with pytest.raises(ValueError):
            GrowthBound(K=0)

    def test_validate_params(self):
        g = GrowthBound(K=1, beta=1)
        assert validate_params(MParams(u=3, omega=1), g, 2)
        assert not validate_params(MParams(u=3, omega=3), g, 2)
        assert not validate_params(MParams(u=1, omega=1), g, 2)

    def test_missing_derivative(self):
        h = FuncHandle(np.exp)
        with pytest.raises(MissingDerivative):
            h.derivative(1)
        assert as_handle(np.sin).derivative(0) is not None


class TestExamples:
    def test_laplace_of_one(self):
        r = m_transform(one, MParams(rho=0, u=2, v=0, omega=1))
        assert abs(r.value - 0.5) < 1e-12

    def test_exponential_integral_value(self):
        ref = simpson_richardson(lambda x: np.exp(-x) / (x + 1), 0.0, 45.0)
        assert rel_err(ref, E_E1_1) < 1e-10
        r = m_transform(one, MParams(rho=1, m=1, u=1, v=0, omega=1))
        assert rel_err(r.value, E_E1_1) < 1e-12

    def test_negative_v(self):
        with pytest.raises(DomainError):
            m_transform(one, MParams(v=-1))

    def test_laplace(self):
        assert abs(laplace(lambda x: np.exp(-x), 1).value - 0.5) < 1e-12
        assert abs(laplace(np.sin, 1).value - 0.5) < 1e-12
        assert abs(laplace(1, 4).value - 0.25) < 1e-12

    def test_natural(self):
        assert abs(natural(1, 2.5, 3.0).value - 0.4) < 1e-12
        assert abs(natural(lambda x: np.exp(-x), 1, 2.0).value - 1 / 3) < 1e-12
        assert natural(np.cos, 1.7, 1.0).value == laplace(np.cos, 1.7).value

    def test_sumudu(self):
        assert abs(sumudu(1, 2.0).value - 1) < 1e-12
        assert abs(sumudu(lambda x: x, 2.5).value - 2.5) < 1e-12
        assert abs(sumudu(lambda x: np.exp(-x), 1.0).value - 0.5) < 1e-12

    def test_stieltjes(self):
        assert rel_err(stieltjes(lambda x: np.exp(-x), 1, 1).value, E_E1_1) < 1e-12
        assert abs(stieltjes(lambda x: (1 + x) ** -2.0, 0, 1).value - 1) < 1e-12
        assert abs(stieltjes(1, 2, 1).value - 1) < 1e-12
        with pytest.raises(DivergentTail):
            stieltjes(1, 0.5, 1)

    def test_mellin(self):
        assert abs(mellin(lambda x: np.exp(-x), 3).value - 2) < 1e-12
        assert rel_err(mellin(lambda x: np.exp(-x), 0.5).value, SQRT_PI) < 1e-12
        assert rel_err(mellin(lambda x: 1 / (1 + x), 0.5).value, math.pi) < 1e-10
        with pytest.raises(DivergentTail):
            mellin(lambda x: np.exp(-x), -0.5)

    def test_borel(self):
        f = lambda x: np.cos(x) * np.exp(-x)
        assert rel_err(borel_dzrbashjan(f, 1.3, 1, 1).value, laplace(f, 1.3).value) < 1e-14
        # y = x^2 substitution turns the nu=2 case into half a Gamma(1/2)
        assert rel_err(borel_dzrbashjan(1, 1, 2, 0.5).value, SQRT_PI) < 1e-12
        assert abs(borel_dzrbashjan(1, 2, 1, 2).value - 0.5) < 1e-12


class TestDuality:
    def test_generic(self):
        reps = duality_residuals(exp_decay, MParams(rho=1, m=1, u=2, v=1, omega=1))
        assert reps and all(r.passed for r in reps)
        assert max(r.rel_residual for r in reps) < 1e-8

    def test_laplace_reduction(self):
        p = MParams(rho=0, m=1, u=1.7, v=0, omega=1)
        for f in CORPUS.values():
            assert rel_err(m_transform(f, p).value, laplace(f, 1.7).value) < 1e-12
        reps = duality_residuals(gaussian, p)
        assert max(r.rel_residual for r in reps) < 1e-12


def test_reduction_lattice():
    w = 1.7
    for f in CORPUS.values():
        m0 = m_transform(f, MParams(rho=0, m=2, u=1.3, v=0, omega=w)).value
        assert rel_err(m0, natural(f, 1.3, w).value) < 1e-9
        assert rel_err(sumudu(f, w).value, natural(f, 1, w).value) < 1e-14
    # u = v = 0, m = 1: y = w x turns (x + w)^-rho f(w x) into w^(rho-1) (y + w^2)^-rho f(y)
    rho = 2.5
    lhs = m_transform(t_exp, MParams(rho=rho, m=1, u=0, v=0, omega=w), check_existence=False).value
    rhs = w ** (rho - 1) * stieltjes(t_exp, rho, w * w).value
    assert rel_err(lhs, rhs) < 1e-9


def test_against_scipy_quad():
    p = MParams(rho=0.7, m=2, u=1.2, v=0.4, omega=1.3)
    f = lambda x: np.cos(x) * np.exp(-0.3 * x)
    ref, _ = integrate.quad(
        lambda x: math.exp(-1.2 * x - 0.4 / x) * (x * x + 1.69) ** -0.7 * f(1.3 * x),
        0, np.inf, epsabs=0, epsrel=1e-13, limit=400)
    assert rel_err(m_transform(f, p).value, ref) < 1e-10


def test_existence_warning():
    h = FuncHandle(np.exp, GrowthBound(K=1, beta=1))
    with pytest.warns(ExistenceWarning):
        try:
            m_transform(h, MParams(u=0.5, omega=1))
        except Exception:
            pass


def test_no_warning_inside_region():
    with warnings.catch_warnings():
        warnings.simplefilter("error", ExistenceWarning)
        m_transform(exp_decay, MParams(rho=1, u=2, omega=1))


def test_log_pow_sum_no_overflow():
    x = np.array([1e-300, 1.0, 1e300])
    out = log_pow_sum(x, 4, 1e100)
    assert np.all(np.isfinite(out))
    assert abs(out[1] - 400 * math.log(10)) < 1e-9


def test_many_matches_scalar():
    p = MParams(rho=0.5, m=2, u=1.0, v=0.3, omega=1.2)
    us = np.array([0.8, 1.5, 2.0 + 1j, 4.0])
    many = m_transform_many(t_exp, p, u=us)
    for u, got in zip(us, many):
        assert rel_err(got, m_transform(t_exp, p.replace(u=u)).value) < 1e-12


@given(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
       st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
       st.floats(0, 2.5), st.integers(1, 3), st.floats(0.5, 4), st.floats(0, 1.5),
       st.floats(0.3, 2.5))
def test_linearity(a, b, rho, m, u, v, w):
    p = MParams(rho=rho, m=m, u=u, v=v, omega=w)
    f = FuncHandle(lambda x: a * gaussian(x) + b * t_exp(x))
    lhs = m_transform(f, p).value
    rhs = a * m_transform(gaussian, p).value + b * m_transform(t_exp, p).value
    assert abs(lhs - rhs) <= 1e-10 * (abs(a) + abs(b)) * max(1.0, abs(rhs)) + 1e-280


@given(st.floats(0, 2), st.integers(1, 2), st.floats(0, 1), st.floats(0.3, 2))
def test_decay_in_u(rho, m, v, w):
    us = np.linspace(0.5, 6, 12)
    vals = np.abs(m_transform_many(unit, MParams(rho=rho, m=m, v=v, omega=w), u=us))
    assert np.all(np.diff(vals) <= 1e-14 * vals[:-1])
