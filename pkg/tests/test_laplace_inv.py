import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gmtransform.corpus import CORPUS, exp_decay, unit
from gmtransform.errors import DomainError, MethodDisagreementWarning, NonFinite
from gmtransform.laplace_inv import (BROMWICH, InversionConfig, inverse_laplace,
                                     inverse_laplace_checked, inverse_natural, m_inverse)
from gmtransform.mtransform import MParams, m_transform_many, natural
from gmtransform.quad import QuadConfig
from gmtransform.rules import image_exponential

TIGHT = QuadConfig(rel_tol=1e-13, abs_tol=1e-300)
METHODS = [InversionConfig(), BROMWICH]


def image_of(f, p):
    return lambda u: m_transform_many(f, p, u=u, cfg=TIGHT)


@pytest.mark.parametrize("cfg", METHODS, ids=["talbot", "bromwich"])
class TestKnownPairs:
    def test_exponential(self, cfg):
        assert abs(inverse_laplace(lambda s: 1 / (s + 1), 1.0, cfg) - math.exp(-1)) < 1e-8

    def test_ramp(self, cfg):
        assert abs(inverse_laplace(lambda s: 1 / s ** 2, 2.0, cfg) - 2.0) < 1e-8

    def test_sine(self, cfg):
        assert abs(inverse_laplace(lambda s: 1 / (s * s + 1), math.pi / 2, cfg) - 1.0) < 1e-6

    def test_sqrt_kernel(self, cfg):
        # L[1/sqrt(pi t)] = 1/sqrt(s) has a branch point at the origin
        t = 0.7
        got = inverse_laplace(lambda s: s ** -0.5, t, cfg)
        assert abs(got - 1 / math.sqrt(math.pi * t)) < 1e-7


def test_config_validation():
    for kw in (dict(n_nodes=15), dict(n_nodes=17), dict(bromwich_alpha=0), dict(method="x"),
               dict(euler_m=48)):
        with pytest.raises(ValueError):
            InversionConfig(**kw)


def test_nonpositive_time():
    with pytest.raises(DomainError):
        inverse_laplace(lambda s: 1 / s, 0.0)


def test_unevaluable_image():
    with pytest.raises(NonFinite):
        inverse_laplace(lambda s: np.full(np.shape(s), np.nan), 1.0)


def test_scalar_only_image():
    F = lambda s: 1 / (complex(s) + 2)
    assert abs(inverse_laplace(F, 1.0) - math.exp(-2)) < 1e-8


def test_checked_agreement():
    with warnings.catch_warnings():
        warnings.simplefilter("error", MethodDisagreementWarning)
        d = inverse_laplace_checked(lambda s: 1 / (s + 1) ** 2, 1.5)
    assert not d.disagreement and d.rel_diff < 1e-4
    assert d.value == d.talbot


def test_checked_flags_disagreement():
    # pole at s = 15 lies right of the Bromwich abscissa 12.5 but inside the Talbot contour
    with pytest.warns(MethodDisagreementWarning):
        d = inverse_laplace_checked(lambda s: 1 / (s - 15), 1.0)
    assert d.disagreement
    assert abs(d.value / math.exp(15) - 1) < 1e-8


@given(st.floats(0.2, 3), st.floats(0.2, 3), st.floats(-2, 2), st.floats(-2, 2))
def test_linearity(a, b, alpha, beta):
    t = 1.3
    F = lambda s: 1 / (s + a)
    G = lambda s: 1 / (s + b) ** 2
    lhs = inverse_laplace(lambda s: alpha * F(s) + beta * G(s), t)
    rhs = alpha * inverse_laplace(F, t) + beta * inverse_laplace(G, t)
    # exact for the rule; the slack is the N=48 Talbot roundoff level
    assert abs(lhs - rhs) < 1e-8 * (1 + abs(alpha) + abs(beta))


class TestNatural:
    def test_unit(self):
        for t in (0.3, 1.0, 4.0):
            assert abs(inverse_natural(lambda u: 1 / u, t, 2.5) - 1) < 1e-8

    def test_roundtrip(self):
        F = lambda u: np.array([natural(exp_decay, ui, 2.0).value for ui in np.atleast_1d(u)])
        assert abs(inverse_natural(F, 1.0, 2.0, BROMWICH) - math.exp(-1)) < 1e-7

    def test_unit_omega_is_laplace(self):
        F = lambda s: 1 / (s * s + 4)
        assert inverse_natural(F, 0.8, 1.0) == inverse_laplace(F, 0.8)


class TestMInverse:
    def test_exp_roundtrip(self):
        p = MParams(rho=1, m=1, v=1, omega=2)
        for x in (0.5, 1.0, 2.0):
            assert abs(m_inverse(image_of(exp_decay, p), x, p) - math.exp(-x)) < 1e-6

    def test_unit_roundtrip(self):
        p = MParams(rho=0.5, m=2, v=0.5, omega=1)
        assert abs(m_inverse(image_of(unit, p), 1.0, p) - 1) < 1e-5

    def test_plain_laplace_reduction(self):
        p = MParams(rho=0, m=1, v=0, omega=1)
        F = lambda s: 1 / (s + 1) ** 2
        assert abs(m_inverse(F, 1.5, p) - inverse_laplace(F, 1.5, BROMWICH)) < 1e-15

    def test_closed_form_image(self):
        # invert the H-function image of e^{-a x}
        p = MParams(rho=1, m=1, v=0.5, omega=1.5)
        a = 0.8
        F = lambda u: np.array([image_exponential(a, p.replace(u=ui)) for ui in np.atleast_1d(u)])
        got = m_inverse(F, 1.2, p, InversionConfig("bromwich_trapezoid", n_nodes=32, euler_m=11))
        assert abs(got - math.exp(-a * 1.2)) < 1e-5

    @pytest.mark.parametrize("name", sorted(CORPUS))
    def test_grid(self, name):
        f = CORPUS[name]
        p = MParams(rho=1, m=2, v=0.5, omega=1.3)
        xs = np.linspace(0.1 * p.omega, 4.0, 6)
        got = np.array([m_inverse(image_of(f, p), x, p) for x in xs])
        assert np.max(np.abs(got - f(xs))) < 1e-5
