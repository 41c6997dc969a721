"""Integral identities of the M-transform checked numerically: Parseval-type
identities, relations with the natural, Laplace, Mellin and
Borel-Dzrbashjan transforms, and the M-convolution theorem.

Every check returns a :class:`ResidualReport`.  Nested integrals are computed
with a batched inner transform evaluated on the whole outer node set at once.
"""
from __future__ import annotations

import numpy as np

from .errors import DivergentTail, DomainError
from .mtransform import FuncHandle, MParams, as_handle, log_pow_sum, m_transform, m_transform_many
from .quad import QuadConfig, integrate_finite, integrate_semi_infinite, integrate_tanh_sinh
from .report import ResidualReport, reports_to_json
from .specfun import gamma, h_1111

__all__ = [
    "ResidualReport", "reports_to_json", "parseval", "parseval_mixed",
    "relation_natural", "relation_laplace", "relation_mellin", "relation_borel",
    "borel_kernel", "m_convolve", "m_convolve_many", "convolution_theorem",
]

OUTER_CFG = QuadConfig(rel_tol=1e-10, abs_tol=1e-14, max_levels=10, max_evals=20_000)


def _weight_log(x, rho, m, w):
    return -rho * log_pow_sum(x, m, w) if rho != 0 else 0.0


def _outer(integrand, cfg):
    return integrate_semi_infinite(integrand, cfg or OUTER_CFG)


# ---------------------------------------------------------------------------
# Parseval-type identities
# ---------------------------------------------------------------------------

def _parseval_side(f, g, rho_outer, rho_inner, p, cfg):
    v, m, w = complex(p.v), p.m, float(p.omega)
    count = [0]

    def integrand(tau):
        inner = m_transform_many(g, p, u=tau, rho=rho_inner, cfg=cfg)
        count[0] += tau.size
        e = _weight_log(tau, rho_outer, m, w) - (v / tau if v != 0 else 0.0)
        return np.exp(e) * f(w * tau) * inner

    res = _outer(integrand, cfg)
    return res.value, res.n_evals + count[0]


def parseval(f, g, rho1, rho2, p: MParams, cfg: QuadConfig | None = None,
             tol: float = 1e-6) -> ResidualReport:
    """Parseval-type identity exchanging ``f`` with the image of ``g``."""
    f, g = as_handle(f), as_handle(g)
    rho1, rho2 = complex(rho1), complex(rho2)
    lhs, n1 = _parseval_side(f, g, rho1, rho2, p, cfg)
    rhs, n2 = _parseval_side(g, f, rho2, rho1, p, cfg)
    return ResidualReport.compare("parseval", lhs, rhs, tol, n1 + n2)


def parseval_mixed(f, g, rho1, rho2, u, p: MParams, cfg: QuadConfig | None = None,
                   tol: float = 1e-6) -> ResidualReport:
    """Mixed Parseval identity: the outer variable of the left side sits in the
    ``v`` slot, the right side shifts ``u`` by ``1/x`` and sets ``v = 0``."""
    f, g = as_handle(f), as_handle(g)
    rho1, rho2, u = complex(rho1), complex(rho2), complex(u)
    m, w = p.m, float(p.omega)

    def lhs_integrand(tau):
        inner = m_transform_many(g, p, u=u, v=tau, rho=rho2, cfg=cfg)
        return np.exp(-u * tau + _weight_log(tau, rho1, m, w)) * f(w * tau) * inner

    def rhs_integrand(x):
        inner = m_transform_many(f, p, u=u + 1.0 / x, v=0.0, rho=rho1, cfg=cfg)
        return np.exp(-u * x + _weight_log(x, rho2, m, w)) * g(w * x) * inner

    lhs = _outer(lhs_integrand, cfg)
    rhs = _outer(rhs_integrand, cfg)
    return ResidualReport.compare("parseval_mixed", lhs.value, rhs.value, tol,
                                  lhs.n_evals + rhs.n_evals)


# ---------------------------------------------------------------------------
# relations with classical transforms
# ---------------------------------------------------------------------------

def _shifted(g, a):
    return FuncHandle(lambda y: np.exp(-a * y) * g(y), label=f"e^(-{a:g}x) {g.label}")


def _inner_image(g, a, p, cfg):
    # u -> M_{rho,m}[exp(-a x) g](u, v, omega), batched in u
    ga = _shifted(g, a)
    return lambda us: m_transform_many(ga, p, u=us, cfg=cfg)


def relation_natural(f, g, a: float, p: MParams, cfg: QuadConfig | None = None,
                     tol: float = 1e-6) -> ResidualReport:
    """``int f(w u) M[e^{-ax} g](u w, v, w) du = M[g(x) N[f](x, w)](a w, v, w)``."""
    f, g = as_handle(f), as_handle(g)
    if not a > 0:
        raise DomainError("a must be positive")
    w = float(p.omega)
    image = _inner_image(g, a, p, cfg)
    lhs = _outer(lambda s: f(w * s) * image(s * w), cfg)
    nat = MParams(rho=0.0, m=1, u=1.0, v=0.0, omega=w)
    h = FuncHandle(lambda y: g(y) * m_transform_many(f, nat, u=y, cfg=cfg), label="g N[f]")
    rhs = m_transform(h, p.replace(u=a * w), cfg, check_existence=False)
    return ResidualReport.compare("relation_natural", lhs.value, rhs.value, tol,
                                  lhs.n_evals + rhs.n_evals)


def relation_laplace(f, g, a: float, p: MParams, cfg: QuadConfig | None = None,
                     tol: float = 1e-6) -> ResidualReport:
    """``int f(u) M[e^{-ax} g](u w, v, w) du = M[g(x) L[f](x)](a w, v, w)``."""
    f, g = as_handle(f), as_handle(g)
    if not a > 0:
        raise DomainError("a must be positive")
    w = float(p.omega)
    image = _inner_image(g, a, p, cfg)
    lhs = _outer(lambda s: f(s) * image(s * w), cfg)
    lap = MParams(rho=0.0, m=1, u=1.0, v=0.0, omega=1.0)
    h = FuncHandle(lambda y: g(y) * m_transform_many(f, lap, u=y, cfg=cfg), label="g L[f]")
    rhs = m_transform(h, p.replace(u=a * w), cfg, check_existence=False)
    return ResidualReport.compare("relation_laplace", lhs.value, rhs.value, tol,
                                  lhs.n_evals + rhs.n_evals)


def relation_mellin(f, a: float, z, p: MParams, cfg: QuadConfig | None = None,
                    tol: float = 1e-6) -> ResidualReport:
    """Mellin transform in ``u`` of ``M[e^{-ax} f](u w, v, w)`` against
    ``Gamma(z) M[x^{-z} f](a w, v, w)``."""
    f = as_handle(f)
    z = complex(z)
    if not a > 0:
        raise DomainError("a must be positive")
    if z.real <= 0:
        raise DivergentTail("Mellin integral diverges at u = 0 for Re z <= 0")
    w = float(p.omega)
    image = _inner_image(f, a, p, cfg)
    probe = np.array([1e4, 1e6, 1e8])
    tail = np.abs(probe ** z * image(probe * w))
    if tail[-1] > 1e-12 and tail[-1] >= 0.5 * tail[-2]:
        raise DivergentTail("u^z M(u w) does not decay; Re z too large for this f")
    lhs = _outer(lambda s: np.exp((z - 1) * np.log(s)) * image(s * w), cfg)
    h = FuncHandle(lambda y: np.exp(-z * np.log(y)) * f(y), label="x^-z f")
    rhs = m_transform(h, p.replace(u=a * w), cfg, check_existence=False)
    return ResidualReport.compare("relation_mellin", lhs.value, complex(gamma(z)) * complex(rhs.value),
                                  tol, lhs.n_evals + rhs.n_evals)


def borel_kernel(y, nu: float, mu: float) -> np.ndarray:
    """``H^{1,1}_{1,1}[y | (1 - nu mu, 1); (0, 1/nu)]`` on an array of ``y > 0``."""
    y = np.asarray(y, dtype=float)
    flat = y.ravel()
    out = np.empty(flat.shape, dtype=float)
    for i, yi in enumerate(flat):
        out[i] = h_1111(yi, nu, mu)
    return out.reshape(y.shape)


def relation_borel(g, a: float, nu: float, mu: float, p: MParams,
                   cfg: QuadConfig | None = None, tol: float = 1e-5) -> ResidualReport:
    """Borel-Dzrbashjan transform of the u-section against the H-kernel form.

    The left side is ``nu w^(nu mu-1) int exp(-(w u)^nu) u^(nu mu-1) M[e^{-ax} g](u w, v, w) du``;
    the right side ``w^(nu mu-1) M[g x^(-nu mu) H(w/x)](a w, v, w)``.
    """
    g = as_handle(g)
    if not (a > 0 and nu > 0 and mu > 0):
        raise DomainError("a, nu, mu must be positive")
    w = float(p.omega)
    nm = nu * mu
    image = _inner_image(g, a, p, cfg)

    def lhs_integrand(s):
        return np.exp(-(w * s) ** nu + (nm - 1) * np.log(s)) * image(s * w)

    lhs = _outer(lhs_integrand, cfg)
    lhs_val = nu * w ** (nm - 1) * complex(lhs.value)
    q = p.replace(u=a * w)
    u_, v_, rho_ = complex(q.u), complex(q.v), complex(q.rho)

    def h_eval(y):
        # the kernel is a contour integral per point: skip nodes where the rest
        # of the transform integrand has already underflowed
        rest = g(y) * y ** (-nm)
        x = y / w
        with np.errstate(all="ignore"):
            weight = np.abs(rest * np.exp(-u_ * x - (v_ / x if v_ != 0 else 0.0)
                                          - rho_ * log_pow_sum(x, q.m, w)))
        keep = np.isfinite(weight) & (weight > 1e-300)
        out = np.zeros(np.shape(y), dtype=complex)
        out[keep] = rest[keep] * borel_kernel(w / y[keep], nu, mu)
        return out

    h = FuncHandle(h_eval, label="g x^-nm H")
    rhs = m_transform(h, q, cfg, check_existence=False)
    rhs_val = w ** (nm - 1) * complex(rhs.value)
    return ResidualReport.compare(f"relation_borel(nu={nu:g},mu={mu:g})", lhs_val, rhs_val, tol,
                                  lhs.n_evals + rhs.n_evals)


# ---------------------------------------------------------------------------
# convolution
# ---------------------------------------------------------------------------

def _conv_exponent(y, s, p):
    """Log of prefactor times both kernel factors, in ``s = omega t / y``."""
    v, rho, m, w = complex(p.v), complex(p.rho), p.m, float(p.omega)
    e = 0.0
    if not p.v_exactly_zero:
        with np.errstate(divide="ignore", invalid="ignore"):
            e = (v * w / y) * (1.0 - 1.0 / (1.0 - s) - 1.0 / s)
    if rho != 0:
        e = e + rho * (log_pow_sum(y / w, m, w) - log_pow_sum(y * (1 - s) / w, m, w)
                       - log_pow_sum(y * s / w, m, w))
    # s = 0 or 1 exactly gives -inf + nan*j from complex v; the kernel is 0 there
    return np.where(np.real(e) == -np.inf, -np.inf, e)


def m_convolve(f, g, x: float, p: MParams, cfg: QuadConfig | None = None) -> complex:
    """M-convolution ``(f * g)(x)``; prefactor and kernels are combined in the
    exponent so that ``exp(v w/x)`` never overflows on its own."""
    f, g = as_handle(f), as_handle(g)
    if complex(p.v).real < 0:
        raise DomainError("Re v must be >= 0")
    if not x > 0:
        raise DomainError("x must be positive")
    w = float(p.omega)

    def integrand(t):
        s = w * t / x
        return np.exp(_conv_exponent(x, s, p)) * f(x - w * t) * g(w * t)

    return integrate_finite(integrand, 0.0, x / w, cfg).value


def m_convolve_many(f, g, xs, p: MParams, cfg: QuadConfig | None = None, *,
                    prefactor: bool = True) -> np.ndarray:
    """Batched ``m_convolve`` on an array of ``x`` (shared tanh-sinh nodes).

    With ``prefactor=False`` the factor ``((x/w)^m + w^m)^rho exp(v w/x)`` is
    left out; callers can then fold it analytically into a kernel.
    """
    f, g = as_handle(f), as_handle(g)
    xs = np.asarray(xs, dtype=float)
    shape = xs.shape
    y = xs.ravel()[:, None]
    w = float(p.omega)
    rho, m, v = complex(p.rho), p.m, complex(p.v)

    def integrand(s):
        e = _conv_exponent(y, s, p)
        if not prefactor:
            e = e - (v * w / y if not p.v_exactly_zero else 0.0)
            if rho != 0:
                e = e - rho * log_pow_sum(y / w, m, w)
        return np.exp(e) * f(y * (1 - s)) * g(y * s) * (y / w)

    res = integrate_tanh_sinh(integrand, 0.0, 1.0, cfg)
    return np.asarray(res.value, dtype=complex).reshape(shape)


def convolution_theorem(f, g, p: MParams, cfg: QuadConfig | None = None,
                        tol: float = 1e-5) -> ResidualReport:
    """``M[f] M[g] = M[f * g]`` at the same ``(u, v, omega)``."""
    f, g = as_handle(f), as_handle(g)
    rho, m, v = complex(p.rho), p.m, complex(p.v)
    w = float(p.omega)
    F = m_transform(f, p, cfg)
    G = m_transform(g, p, cfg)
    bare = FuncHandle(lambda y: m_convolve_many(f, g, y, p, cfg, prefactor=False), label="f*g")

    # the convolution prefactor at omega x is exactly the inverse kernel weight
    def log_weight(x):
        out = rho * log_pow_sum(x, m, w) if rho != 0 else 0.0
        return out + (v / x if not p.v_exactly_zero else 0.0)

    rhs = m_transform(bare, p, OUTER_CFG if cfg is None else cfg, log_weight=log_weight)
    return ResidualReport.compare("convolution_theorem", complex(F.value) * complex(G.value),
                                  rhs.value, tol, F.n_evals + G.n_evals + rhs.n_evals)
