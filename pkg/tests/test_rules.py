import numpy as np
import pytest

from gmtransform.corpus import CORPUS, exp_decay, gaussian, t_exp, unit
from gmtransform.errors import DomainError, UnsupportedOrder
from gmtransform.mtransform import MParams, m_transform, natural
from gmtransform.quad import QuadConfig
from gmtransform.rules import (apply_elimination, apply_scaling, derivative_rhs, image_exponential,
                               image_power, image_power_exponential, m_derivative,
                               m_derivative_weighted, table1_residuals)
from oracles import rel_err

TIGHT = QuadConfig(rel_tol=1e-13, abs_tol=1e-300)
P = MParams(rho=1, m=1, u=2, v=1, omega=1)


class TestImages:
    def test_power_unit(self):
        p = MParams(rho=1, m=1, u=1, v=0, omega=1)
        assert rel_err(image_power(1, p), m_transform(unit, p, TIGHT).value) < 1e-7

    def test_power_linear(self):
        p = MParams(rho=0.5, m=2, u=2, v=0.5, omega=1)
        assert rel_err(image_power(2, p), m_transform(lambda x: x, p, TIGHT).value) < 1e-6

    def test_exponential(self):
        p = MParams(rho=1, m=1, u=1, v=0, omega=1)
        assert rel_err(image_exponential(1, p), m_transform(exp_decay, p, TIGHT).value) < 1e-7

    def test_exponential_shift(self):
        p = MParams(rho=1.5, m=2, u=0.8, v=0.4, omega=1.3)
        a = 0.6
        shifted = image_power(1, p.replace(u=p.u + a * p.omega))
        assert rel_err(image_exponential(a, p), shifted) < 1e-12

    def test_exponential_at_zero(self):
        p = MParams(rho=0.7, m=2, u=1.1, v=0.2, omega=0.9)
        assert rel_err(image_exponential(0, p), image_power(1, p)) < 1e-12

    def test_power_exponential_reductions(self):
        p = MParams(rho=1.2, m=1, u=1.4, v=0.5, omega=1.1)
        assert rel_err(image_power_exponential(1, 0.8, p), image_exponential(0.8, p)) < 1e-10
        assert rel_err(image_power_exponential(1.7, 0, p), image_power(1.7, p)) < 1e-10

    def test_power_exponential_direct(self):
        p = MParams(rho=1, m=1, u=1, v=0, omega=1)
        assert rel_err(image_power_exponential(2, 1, p), m_transform(t_exp, p, TIGHT).value) < 1e-7

    def test_reduction_with_v_zero_and_m_one(self):
        # v = 0, m = 1, rho = 1: (x + w)^-1 image of x^(lambda-1) at lambda = 1 is e^{uw} E_1(uw)
        p = MParams(rho=1, m=1, u=2, v=0, omega=1)
        assert rel_err(image_power(1, p), 0.3613286168882226) < 1e-10

    def test_rho_zero_excluded(self):
        with pytest.raises(DomainError):
            image_power(1, MParams(rho=0, u=1))


class TestScaling:
    def test_identity_alpha(self):
        r = apply_scaling(exp_decay, 1.0, P)
        assert r.abs_residual == 0

    @pytest.mark.parametrize("alpha", [0.5, 2.0, 3.0])
    @pytest.mark.parametrize("f", [exp_decay, unit, gaussian])
    def test_residual(self, f, alpha):
        r = apply_scaling(f, alpha, P)
        assert r.passed and r.rel_residual < 1e-8

    def test_bad_alpha(self):
        with pytest.raises(DomainError):
            apply_scaling(exp_decay, -1.0, P)


class TestElimination:
    def test_zero_eta(self):
        reps = apply_elimination(exp_decay, 0, P)
        assert reps[0].abs_residual == 0

    def test_to_natural(self):
        reps = apply_elimination(exp_decay, 1, P)
        assert len(reps) == 2 and all(r.rel_residual < 1e-8 for r in reps)
        v, w = 1.0, 1.0
        nat = natural(lambda y: np.exp(-v * w / y) * np.exp(-y), 2, w).value
        assert rel_err(reps[0].lhs, nat) < 1e-8

    def test_half(self):
        reps = apply_elimination(t_exp, 0.5, P.replace(m=2, omega=1.4))
        assert reps[0].rel_residual < 1e-8

    def test_too_large_eta(self):
        with pytest.raises(DomainError):
            apply_elimination(exp_decay, 2, P)


class TestTable:
    def test_all_rows(self):
        p = MParams(rho=0.5, m=2, u=1.5, v=0.3, omega=1.3)
        for f in CORPUS.values():
            for n in (1, 2):
                for r in table1_residuals(f, n, 0.7, p):
                    assert r.passed, str(r)

    def test_row_five_trivial(self):
        r = table1_residuals(exp_decay, 1, 0.0, P, rows=("v",))[0]
        assert r.abs_residual == 0

    def test_row_one_fd(self):
        r = table1_residuals(exp_decay, 1, 0.5, MParams(rho=0.5, m=2, u=1.3, v=0.4, omega=1.1),
                             rows=("i",))[0]
        assert r.rel_residual < 1e-5

    def test_order_limit(self):
        with pytest.raises(UnsupportedOrder):
            table1_residuals(exp_decay, 3, 0.5, P, rows=("ii",))


class TestDerivative:
    def test_first_order(self):
        _, r = m_derivative(exp_decay, 1, P)
        assert r.rel_residual < 1e-7

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    @pytest.mark.parametrize("f", [exp_decay, gaussian, t_exp])
    def test_orders(self, f, n):
        _, r = m_derivative(f, n, MParams(rho=0.7, m=2, u=1.6, v=0.5, omega=1.2))
        assert r.rel_residual < 1e-7 or r.abs_residual < 1e-7

    def test_v_zero_branch(self):
        # boundary values enter instead of the v-sum
        for f in (exp_decay, gaussian, unit):
            _, r = m_derivative(f, 2, MParams(rho=0.7, m=2, u=2, v=0, omega=1.3))
            assert r.passed, str(r)

    def test_inductive_consistency(self):
        p = MParams(rho=1, m=1, u=2, v=0.5, omega=1.2)
        two = derivative_rhs(gaussian, 2, p)
        once = derivative_rhs(gaussian.derivative(1), 1, p)
        assert rel_err(two, once) < 1e-7

    def test_weighted(self):
        _, r0 = m_derivative_weighted(exp_decay, 1, 0, P)
        rhs, _ = m_derivative(exp_decay, 1, P)
        assert rel_err(r0.rhs, rhs) < 1e-15
        _, r = m_derivative_weighted(exp_decay, 1, 0.5, P)
        assert r.rel_residual < 1e-7
        # nu = rho leaves no m rho coefficient
        _, r = m_derivative_weighted(t_exp, 2, 1, P)
        assert r.rel_residual < 1e-7

    def test_order_bounds(self):
        with pytest.raises(UnsupportedOrder):
            m_derivative(exp_decay, 5, P)
        with pytest.raises(DomainError):
            m_derivative(exp_decay, 0, P)
