"""Closed-form M-images through the extended H-function, and the operational
rules of the transform (scaling, elimination, shift/derivative table,
transform of derivatives)."""
from __future__ import annotations

import math
from math import comb, factorial

import numpy as np

from .errors import DomainError, StepTooSmall, UnsupportedOrder
from .mtransform import (FuncHandle, MParams, as_handle, log_pow_sum, m_transform,
                         m_transform_many, natural)
from .quad import QuadConfig, integrate_semi_infinite
from .report import ResidualReport
from .specfun import ContourSpec, ExtHParams, gamma, h_ext_2112

__all__ = [
    "image_power", "image_exponential", "image_power_exponential",
    "power_image_params", "apply_scaling", "apply_elimination", "table1_residuals",
    "m_derivative", "m_derivative_weighted", "derivative_rhs",
]

# tight settings for values that get differenced
FD_CFG = QuadConfig(rel_tol=1e-14, abs_tol=1e-300, max_levels=14)
MAX_DERIVATIVE_ORDER = 4


def _clean(z):
    z = complex(z)
    return z.real if z.imag == 0 else z


# ---------------------------------------------------------------------------
# power / exponential images
# ---------------------------------------------------------------------------

def power_image_params(lam, u_eff, p: MParams) -> ExtHParams:
    """Rows ``(1, 1/m); (lam, 1)_{u v}, (rho, 1/m)`` for argument ``u omega``."""
    return ExtHParams(a=1.0, alpha=1.0 / p.m, b1=complex(lam), beta1=1.0,
                      b_ext=0.0 if p.v_exactly_zero else complex(u_eff) * complex(p.v),
                      b2=complex(p.rho), beta2=1.0 / p.m)


def _power_image(lam, u_eff, p: MParams, spec: ContourSpec | None, rel_tol: float):
    lam, u_eff, rho = complex(lam), complex(u_eff), complex(p.rho)
    if rho == 0:
        raise DomainError("closed form needs rho != 0; use direct quadrature for rho = 0")
    if rho.real <= 0:
        raise DomainError("closed form needs Re rho > 0")
    if lam.real <= 0:
        raise DomainError("closed form needs Re lambda > 0")
    if u_eff.real <= 0:
        raise DomainError("closed form needs Re u > 0")
    if not p.v_exactly_zero and (u_eff * complex(p.v)).real <= 0:
        raise DomainError("closed form needs Re(u v) > 0 or v = 0")
    w = float(p.omega)
    h = h_ext_2112(u_eff * w, power_image_params(lam, u_eff, p), spec, rel_tol=rel_tol)
    pref = w ** (lam - p.m * rho - 1) * u_eff ** (-lam) / (p.m * gamma(rho))
    return _clean(pref * h)


def image_power(lam, p: MParams, spec: ContourSpec | None = None, *, rel_tol: float = 1e-12):
    """``M_{rho,m}[x^(lam-1)](u, v, omega)`` in closed form."""
    return _power_image(lam, p.u, p, spec, rel_tol)


def image_exponential(a: float, p: MParams, spec: ContourSpec | None = None, *,
                      rel_tol: float = 1e-12):
    """``M_{rho,m}[exp(-a x)](u, v, omega)`` in closed form (``u -> u + a omega``)."""
    if a < 0:
        raise DomainError("a must be nonnegative")
    return _power_image(1.0, complex(p.u) + a * p.omega, p, spec, rel_tol)


def image_power_exponential(lam, a: float, p: MParams, spec: ContourSpec | None = None, *,
                            rel_tol: float = 1e-12):
    """``M_{rho,m}[x^(lam-1) exp(-a x)](u, v, omega)`` in closed form.

    The extension parameter of the H-function is ``(u + a omega) v``.
    """
    if a < 0:
        raise DomainError("a must be nonnegative")
    return _power_image(lam, complex(p.u) + a * p.omega, p, spec, rel_tol)


# ---------------------------------------------------------------------------
# scaling and elimination
# ---------------------------------------------------------------------------

def apply_scaling(f, alpha: float, p: MParams, cfg: QuadConfig | None = None,
                  tol: float = 1e-8) -> ResidualReport:
    """``M[f(alpha^2 x)](u,v,w)`` against ``alpha^(m rho-1) M[f](u/alpha, alpha v, alpha w)``."""
    f = as_handle(f)
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    a2 = alpha * alpha
    lhs = m_transform(FuncHandle(lambda x: f(a2 * x), label="f(alpha^2 x)"), p, cfg)
    q = p.replace(u=complex(p.u) / alpha, v=complex(p.v) * alpha, omega=p.omega * alpha)
    rhs = m_transform(f, q, cfg)
    fac = alpha ** (p.m * complex(p.rho) - 1)
    return ResidualReport.compare(f"scaling(alpha={alpha:g})", lhs.value, fac * rhs.value, tol,
                                  lhs.n_evals + rhs.n_evals)


def apply_elimination(f, eta, p: MParams, cfg: QuadConfig | None = None,
                      tol: float = 1e-8) -> list[ResidualReport]:
    """``M_rho[((x/w)^m + w^m)^eta f]`` against ``M_{rho-eta}[f]``.

    At ``eta = rho`` the natural-transform form is checked as well.
    """
    f = as_handle(f)
    eta, rho = complex(eta), complex(p.rho)
    if (rho - eta).real < 0:
        raise DomainError("elimination needs Re(rho - eta) >= 0")
    m, w = p.m, float(p.omega)
    weighted = FuncHandle(lambda y: ((y / w) ** m + w ** m) ** eta * f(y), label="weighted f")
    lhs = m_transform(weighted, p, cfg)
    rhs = m_transform(f, p.replace(rho=rho - eta), cfg)
    out = [ResidualReport.compare(f"elimination(eta={_clean(eta)})", lhs.value, rhs.value, tol,
                                  lhs.n_evals + rhs.n_evals)]
    if eta == rho:
        v = complex(p.v)
        nat = natural(FuncHandle(lambda y: np.exp(-v * w / y) * f(y), label="e^{-v w/x} f"),
                      p.u, w, cfg)
        out.append(ResidualReport.compare("elimination_to_natural", lhs.value, nat.value, tol,
                                          nat.n_evals))
    return out


# ---------------------------------------------------------------------------
# Table of further images
# ---------------------------------------------------------------------------

def _central_nth(F, x0, h, n):
    # second-order central n-th difference, evaluated as one batch
    offs = np.array([(n / 2 - k) * h for k in range(n + 1)])
    coef = np.array([(-1) ** k * comb(n, k) for k in range(n + 1)], dtype=float)
    vals = F(x0 + offs)
    return np.dot(coef, vals) / h ** n, np.max(np.abs(vals))


def _fd_derivative(F, x0, n: int, rel_step: float = 1e-3, noise: float = 1e-14):
    """n-th derivative of a batched ``F`` at ``x0`` with one Richardson step."""
    h = rel_step * max(abs(x0), 1e-3)
    d1, scale = _central_nth(F, x0, h, n)
    d2, _ = _central_nth(F, x0, h / 2, n)
    d = (4 * d2 - d1) / 3
    noise_level = noise * scale * 2 ** n / (h / 2) ** n
    if noise_level > 1e-3 * max(abs(d), 1e-300):
        raise StepTooSmall(f"finite-difference noise {noise_level:.1e} dominates derivative {abs(d):.1e}")
    return d


def _tail_integral(F, s0, n: int, cfg):
    """n-fold iterated integral ``int_s0^inf ... F`` via Cauchy's formula."""
    fact = factorial(n - 1)

    def integrand(t):
        return t ** (n - 1) / fact * F(s0 + t)

    return integrate_semi_infinite(integrand, cfg)


def table1_residuals(f, n: int, a: float, p: MParams, cfg: QuadConfig | None = None, *,
                     tol_fd: float = 1e-5, tol_quad: float = 1e-7,
                     rows: tuple = ("i", "ii", "iii", "iv", "v", "vi")) -> list[ResidualReport]:
    """Residuals of the six rows of the table of further images.

    Derivative rows (i), (iv) are checked with central differences; tail
    integral rows (ii), (iii) with a nested quadrature (``n <= 2``).
    """
    f = as_handle(f)
    if n < 1:
        raise DomainError("n must be a positive integer")
    u, v, w = complex(p.u), complex(p.v), float(p.omega)
    out = []

    def x_pow(k):
        return FuncHandle(lambda y: y ** k * f(y), label=f"x^{k} f")

    def report(row, lhs, rhs, tol, evals=0):
        out.append(ResidualReport.compare(f"table1_{row}(n={n},a={a:g})", lhs, rhs, tol, evals))

    def fd_row(row, lhs_handle, F, x0, sign_pow):
        lhs = m_transform(lhs_handle, p, FD_CFG).value
        try:
            d = _fd_derivative(F, x0, n)
        except StepTooSmall:
            out.append(ResidualReport(f"table1_{row}(n={n},a={a:g}) step too small",
                                      complex(lhs), complex("nan"), math.inf, math.inf,
                                      tol_fd, False, 0))
            return
        report(row, lhs, sign_pow * d, tol_fd)

    if "i" in rows:
        fd_row("i", x_pow(n), lambda us: m_transform_many(f, p, u=us, cfg=FD_CFG), u,
               (-1) ** n * w ** n)
    if "ii" in rows or "iii" in rows:
        if n > 2:
            raise UnsupportedOrder("tail-integral rows are limited to n <= 2")
    if "ii" in rows:
        lhs = m_transform(x_pow(n), p, cfg)
        tail = _tail_integral(lambda s: m_transform_many(f, p, v=s, cfg=cfg), v, n, cfg)
        report("ii", lhs.value, w ** n * complex(tail.value), tol_quad, tail.n_evals)
    if "iii" in rows:
        lhs = m_transform(x_pow(-n), p, cfg)
        tail = _tail_integral(lambda s: m_transform_many(f, p, u=s, cfg=cfg), u, n, cfg)
        report("iii", lhs.value, w ** (-n) * complex(tail.value), tol_quad, tail.n_evals)
    if "iv" in rows:
        if v.real <= 0:
            raise DomainError("row (iv) needs Re v > 0")
        fd_row("iv", x_pow(-n), lambda vs: m_transform_many(f, p, v=vs, cfg=FD_CFG), v,
               (-1) ** n * w ** (-n))
    if "v" in rows:
        lhs = m_transform(FuncHandle(lambda y: np.exp(-a / y) * f(y), label="e^{-a/x} f"), p, cfg)
        rhs = m_transform(f, p.replace(v=v + a / w), cfg)
        report("v", lhs.value, rhs.value, tol_quad, lhs.n_evals + rhs.n_evals)
    if "vi" in rows:
        lhs = m_transform(FuncHandle(lambda y: np.exp(-a * y) * f(y), label="e^{-ax} f"), p, cfg)
        rhs = m_transform(f, p.replace(u=u + a * w), cfg)
        report("vi", lhs.value, rhs.value, tol_quad, lhs.n_evals + rhs.n_evals)
    return out


# ---------------------------------------------------------------------------
# transform of derivatives
# ---------------------------------------------------------------------------

def _check_order(n):
    if n < 1:
        raise DomainError("derivative order must be >= 1")
    if n > MAX_DERIVATIVE_ORDER:
        raise UnsupportedOrder(f"derivative order {n} > {MAX_DERIVATIVE_ORDER}")


def derivative_rhs(f, n: int, p: MParams, cfg: QuadConfig | None = None) -> complex:
    """Right-hand side of the derivative rule for ``M_{rho,m}[f^(n)]``.

    The ``v`` sum is skipped when ``v`` is exactly zero; its coefficient
    vanishes and the transforms it multiplies may diverge.
    """
    f = as_handle(f)
    _check_order(n)
    u, v, rho, m, w = complex(p.u), complex(p.v), complex(p.rho), p.m, float(p.omega)
    total = (u / w) ** n * complex(m_transform(f, p, cfg).value)
    for k in range(n):
        g = f.derivative(n - k - 1)
        c = (u / w) ** k
        if p.v_exactly_zero:
            g0 = complex(np.asarray(g(np.array([0.0])))[0])
            total -= u ** k / w ** (m * rho + k + 1) * g0
        else:
            h = FuncHandle(lambda y, g=g: y ** -2.0 * g(y), label="x^-2 f")
            total -= v * w * c * complex(m_transform(h, p, cfg).value)
        if rho != 0:
            h = FuncHandle(lambda y, g=g: y ** (m - 1) * g(y), label="x^(m-1) f")
            total += m * rho / w ** m * c * complex(m_transform(h, p.replace(rho=rho + 1), cfg).value)
    return _clean(total)


def m_derivative(f, n: int, p: MParams, cfg: QuadConfig | None = None,
                 tol: float = 1e-7) -> tuple[complex, ResidualReport]:
    """Evaluate the derivative rule and compare with direct ``M[f^(n)]``."""
    f = as_handle(f)
    _check_order(n)
    rhs = derivative_rhs(f, n, p, cfg)
    direct = m_transform(f.derivative(n), p, cfg)
    return rhs, ResidualReport.compare(f"derivative(n={n})", direct.value, rhs, tol, direct.n_evals)


def m_derivative_weighted(f, n: int, nu, p: MParams, cfg: QuadConfig | None = None,
                          tol: float = 1e-7) -> tuple[complex, ResidualReport]:
    """Weighted derivative rule: transform of ``((x/w)^m + w^m)^nu f^(n)``.

    Equals the derivative rule with ``rho`` replaced by ``rho - nu``.
    """
    f = as_handle(f)
    _check_order(n)
    nu, rho = complex(nu), complex(p.rho)
    if (rho - nu).real < 0:
        raise DomainError("weighted derivative rule needs Re(rho - nu) >= 0")
    rhs = derivative_rhs(f, n, p.replace(rho=rho - nu), cfg)
    m, w = p.m, float(p.omega)
    direct = m_transform(f.derivative(n), p, cfg, log_weight=lambda x: nu * log_pow_sum(x, m, w))
    return rhs, ResidualReport.compare(f"derivative_weighted(n={n},nu={_clean(nu)})",
                                       direct.value, rhs, tol, direct.n_evals)
