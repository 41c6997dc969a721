"""Direct quadrature of the M-transform

    M_{rho,m}[f](u, v, omega) = int_0^inf exp(-u x - v/x) (x^m + omega^m)^(-rho) f(omega x) dx

and of the classical transforms it contains (Laplace, natural, Sumudu,
Stieltjes, Mellin, Borel-Dzrbashjan).
"""
from __future__ import annotations

import dataclasses
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DivergentTail, DomainError, ExistenceWarning, MissingDerivative
from .quad import QuadConfig, QuadResult, integrate_semi_infinite, integrate_tanh_sinh
from .report import ResidualReport

__all__ = [
    "GrowthBound", "FuncHandle", "as_handle", "MParams", "validate_params",
    "m_transform", "m_transform_many", "laplace", "natural", "sumudu", "stieltjes",
    "mellin", "borel_dzrbashjan", "duality_residuals", "log_pow_sum",
]


@dataclass(frozen=True)
class GrowthBound:
    """Certificate ``|f(x)| <= K x^power exp(x/beta)`` for ``x > T``."""
    K: float = 1.0
    beta: float = 1e6
    T: float = 0.0
    power: float = 0.0

    def __post_init__(self):
        if not (self.K > 0 and self.beta > 0 and self.T >= 0 and self.power >= 0):
            raise ValueError("GrowthBound needs K, beta > 0 and T, power >= 0")

    def bound(self, x):
        x = np.asarray(x, dtype=float)
        return self.K * x ** self.power * np.exp(x / self.beta)


@dataclass(frozen=True)
class FuncHandle:
    """A vectorized real-variable function with optional analytic derivatives.

    ``derivs[k]`` is the k-th derivative, so ``derivs[0]`` (when present) is
    the function itself.  Callables must accept and return numpy arrays and
    be reentrant.
    """
    eval: Callable
    growth: GrowthBound | None = None
    derivs: tuple = ()
    label: str = "f"

    def __call__(self, x):
        return self.eval(x)

    def derivative(self, k: int) -> "FuncHandle":
        if k == 0:
            return self
        if k >= len(self.derivs) or self.derivs[k] is None:
            raise MissingDerivative(f"{self.label}: derivative of order {k} not supplied")
        return FuncHandle(self.derivs[k], None, tuple(self.derivs[k:]), f"{self.label}^({k})")

    def map(self, fn: Callable, label: str | None = None) -> "FuncHandle":
        """Handle for ``x -> fn(x, f(x))`` (derivatives are dropped)."""
        inner = self.eval
        return FuncHandle(lambda x: fn(x, inner(x)), None, (), label or self.label)


def _constant(c):
    c = complex(c)
    c = c.real if c.imag == 0 else c
    return lambda x: np.full(np.shape(x), c)


def as_handle(f, label: str | None = None) -> FuncHandle:
    """Coerce a number, callable or FuncHandle into a FuncHandle."""
    if isinstance(f, FuncHandle):
        return f
    if callable(f):
        return FuncHandle(f, None, (f,), label or getattr(f, "__name__", "f"))
    if np.isscalar(f):
        fn = _constant(f)
        zero = _constant(0.0)
        return FuncHandle(fn, GrowthBound(abs(complex(f)) or 1.0, 1e6), (fn, zero, zero, zero, zero),
                          label or repr(f))
    raise TypeError(f"cannot turn {type(f).__name__} into a function handle")


@dataclass(frozen=True)
class MParams:
    rho: complex = 0.0
    m: int = 1
    u: complex = 1.0
    v: complex = 0.0
    omega: float = 1.0
    v_exactly_zero: bool = field(init=False)

    def __post_init__(self):
        if not (isinstance(self.m, (int, np.integer)) and self.m >= 1):
            raise DomainError(f"m must be a positive integer (got {self.m!r})")
        if not (np.isreal(self.omega) and self.omega > 0):
            raise DomainError(f"omega must be a positive real (got {self.omega!r})")
        if complex(self.rho).real < 0:
            raise DomainError("Re rho must be >= 0")
        # exact comparison on purpose: the indicator is discrete
        object.__setattr__(self, "v_exactly_zero", complex(self.v) == 0)

    def replace(self, **changes) -> "MParams":
        return dataclasses.replace(self, **changes)


def validate_params(p: MParams, g: GrowthBound, mu: float) -> bool:
    """Sufficient existence condition: ``0 < omega < mu`` and ``Re u > mu/beta``."""
    return bool(0 < p.omega < mu and complex(p.u).real > mu / g.beta)


def _warn_existence(f: FuncHandle, u, omega):
    g = f.growth
    if g is None:
        return
    if np.any(np.real(u) <= omega / g.beta):
        warnings.warn(f"Re u <= omega/beta for {f.label}: outside the sufficient "
                      "convergence region", ExistenceWarning, stacklevel=3)


def _check_v(v):
    if np.any(np.real(v) < 0):
        raise DomainError("Re v must be >= 0: exp(-v/x) blows up at x = 0")


def log_pow_sum(x, m: int, omega: float):
    """Overflow-free ``log(x^m + omega^m)`` for ``x >= 0``."""
    with np.errstate(divide="ignore"):
        return np.logaddexp(m * np.log(x), m * math.log(omega))


def _kernel_log(x, u, v, rho, m, omega, log_weight):
    # exponent of the kernel; v == 0 skips the v/x term entirely
    e = -u * x
    if np.any(v != 0):
        e = e - v / x
    if rho != 0:
        e = e - rho * log_pow_sum(x, m, omega)
    if log_weight is not None:
        e = e + log_weight(x)
    return e


def m_transform(f, p: MParams, cfg: QuadConfig | None = None, *,
                log_weight: Callable | None = None, mapping: str = "exp_sinh",
                check_existence: bool = True) -> QuadResult:
    """``M_{rho,m}[f](u, v, omega)`` by double-exponential quadrature.

    ``log_weight(x)``, if given, is added to the kernel exponent.  It lets
    callers fold factors such as ``exp(v/x)`` into the kernel so that they
    cancel analytically instead of as ``0 * inf``.
    """
    f = as_handle(f)
    _check_v(p.v)
    if check_existence:
        _warn_existence(f, p.u, p.omega)
    u, v, rho, m, w = complex(p.u), complex(p.v), complex(p.rho), p.m, float(p.omega)
    if p.v_exactly_zero:
        v = 0

    def integrand(x):
        return np.exp(_kernel_log(x, u, v, rho, m, w, log_weight)) * f(w * x)

    return integrate_semi_infinite(integrand, cfg, mapping=mapping)


def m_transform_many(f, p: MParams, *, u=None, v=None, rho=None,
                     cfg: QuadConfig | None = None, log_weight: Callable | None = None,
                     chunk: int = 256, check_existence: bool = False) -> np.ndarray:
    """Vectorized ``m_transform`` over arrays of ``u``, ``v`` and/or ``rho``.

    Arrays are broadcast together; scalars or ``None`` fall back to the
    values in ``p``.  ``f`` is evaluated once per quadrature node for the
    whole batch.  The batched form is mainly an inner integral of nested
    quadratures, so the existence warning is off by default.
    """
    f = as_handle(f)
    us, vs, rs = np.broadcast_arrays(
        np.asarray(p.u if u is None else u, dtype=complex),
        np.asarray(p.v if v is None else v, dtype=complex),
        np.asarray(p.rho if rho is None else rho, dtype=complex))
    shape = us.shape
    us, vs, rs = us.ravel(), vs.ravel(), rs.ravel()
    _check_v(vs)
    if check_existence:
        _warn_existence(f, us, p.omega)
    m, w = p.m, float(p.omega)
    out = np.empty(us.shape, dtype=complex)
    for i in range(0, us.size, chunk):
        uu = us[i:i + chunk, None]
        vv = vs[i:i + chunk, None]
        rr = rs[i:i + chunk, None]
        has_v = bool(np.any(vv != 0))
        has_rho = bool(np.any(rr != 0))

        def integrand(x, uu=uu, vv=vv, rr=rr, has_v=has_v, has_rho=has_rho):
            e = -uu * x
            if has_v:
                e = e - vv / x
            if has_rho:
                e = e - rr * log_pow_sum(x, m, w)
            if log_weight is not None:
                e = e + log_weight(x)
            return np.exp(e) * f(w * x)

        res = integrate_semi_infinite(integrand, cfg)
        out[i:i + chunk] = res.value
    return out.reshape(shape)


# ---------------------------------------------------------------------------
# classical special cases
# ---------------------------------------------------------------------------

def laplace(f, u, cfg: QuadConfig | None = None) -> QuadResult:
    """``int_0^inf exp(-u x) f(x) dx``."""
    f = as_handle(f)
    u = complex(u)
    _warn_existence(f, u, 1.0)
    return integrate_semi_infinite(lambda x: np.exp(-u * x) * f(x), cfg)


def natural(f, u, omega: float, cfg: QuadConfig | None = None) -> QuadResult:
    """``int_0^inf exp(-u x) f(omega x) dx``."""
    f = as_handle(f)
    u = complex(u)
    if not omega > 0:
        raise DomainError("omega must be positive")
    _warn_existence(f, u, omega)
    return integrate_semi_infinite(lambda x: np.exp(-u * x) * f(omega * x), cfg)


def sumudu(f, omega: float, cfg: QuadConfig | None = None) -> QuadResult:
    """``int_0^inf exp(-x) f(omega x) dx``."""
    return natural(f, 1.0, omega, cfg)


def _tail_ratio(g, xs):
    with np.errstate(all="ignore"):
        a = np.abs(np.asarray(g(np.asarray(xs, dtype=float)), dtype=complex))
    return a


def _probe_decay(g, xs, what):
    """Raise DivergentTail unless ``|g|`` shrinks along the probe points."""
    a = _tail_ratio(g, xs)
    if not np.all(np.isfinite(a)):
        raise DivergentTail(f"{what}: integrand not finite in the tail")
    if a[-1] > 1e-12 and a[-1] >= 0.5 * a[-2]:
        raise DivergentTail(f"{what}: integrand does not decay fast enough in the tail")


def stieltjes(f, rho, omega: float, cfg: QuadConfig | None = None) -> QuadResult:
    """Generalized Stieltjes transform ``int_0^inf f(x) (x + omega)^(-rho) dx``.

    Note the argument is ``f(x)``, not ``f(omega x)``.
    """
    f = as_handle(f)
    rho = complex(rho)
    if not omega > 0:
        raise DomainError("omega must be positive")

    def integrand(x):
        return f(x) * np.exp(-rho * np.log(x + omega))

    # x * integrand must vanish at infinity
    _probe_decay(lambda x: x * integrand(x), [1e4, 1e6, 1e8], "stieltjes")
    return integrate_semi_infinite(integrand, cfg)


def mellin(f, z, cfg: QuadConfig | None = None) -> QuadResult:
    """``int_0^inf x^(z-1) f(x) dx`` split at 1; the upper half uses ``x -> 1/x``."""
    f = as_handle(f)
    z = complex(z)
    _probe_decay(lambda x: x ** z * f(x), [1e-4, 1e-8, 1e-12], "mellin (x -> 0)")
    _probe_decay(lambda x: x ** z * f(x), [1e4, 1e8, 1e12], "mellin (x -> inf)")
    lower = integrate_tanh_sinh(lambda x: x ** (z - 1) * f(x), 0.0, 1.0, cfg)
    upper = integrate_tanh_sinh(lambda y: y ** (-z - 1) * f(1.0 / y), 0.0, 1.0, cfg)
    value = complex(lower.value) + complex(upper.value)
    return QuadResult(value.real if value.imag == 0 else value,
                      lower.abs_err_est + upper.abs_err_est,
                      lower.n_evals + upper.n_evals, True)


def borel_dzrbashjan(f, s, nu: float, mu: float, cfg: QuadConfig | None = None) -> QuadResult:
    """``nu s^(nu mu - 1) int_0^inf exp(-s^nu x^nu) x^(nu mu - 1) f(x) dx``."""
    f = as_handle(f)
    s = complex(s)
    if not (nu > 0 and mu > 0):
        raise DomainError("nu and mu must be positive")
    sn = s ** nu
    if sn.real <= 0:
        raise DomainError("Re(s^nu) must be positive")
    a = nu * mu - 1

    def integrand(x):
        return np.exp(-sn * x ** nu + a * np.log(x)) * f(x)

    res = integrate_semi_infinite(integrand, cfg)
    pref = nu * s ** a
    value = pref * complex(res.value)
    return QuadResult(value.real if value.imag == 0 else value, abs(pref) * res.abs_err_est,
                      res.n_evals, True)


# ---------------------------------------------------------------------------
# duality checks
# ---------------------------------------------------------------------------

def duality_residuals(f, p: MParams, cfg: QuadConfig | None = None,
                      tol: float = 1e-8) -> list[ResidualReport]:
    """Residuals of the duality relations with the Laplace, natural and Sumudu
    transforms.  Each right-hand side is assembled through a different code
    path from the direct transform."""
    f = as_handle(f)
    _check_v(p.v)
    u, v, rho, m, w = complex(p.u), complex(p.v), complex(p.rho), p.m, float(p.omega)
    direct = m_transform(f, p, cfg)
    M = direct.value
    out = []

    def lap_form(x, fx):
        return np.exp(-v / x - rho * log_pow_sum(x, m, w)) * fx

    # M = L[exp(-v/x) f(omega x) (x^m + omega^m)^(-rho)](u)
    g1 = FuncHandle(lambda x: lap_form(x, f(w * x)), label="laplace-form")
    r1 = laplace(g1, u, cfg)
    out.append(ResidualReport.compare("duality_laplace", M, r1.value, tol,
                                      direct.n_evals + r1.n_evals))

    # M = (1/omega) L[exp(-v omega/x) f(x) ((x/omega)^m + omega^m)^(-rho)](u/omega)
    def scaled(x):
        return np.exp(-v * w / x - rho * log_pow_sum(x / w, m, w)) * f(x)

    r2 = laplace(FuncHandle(scaled, label="scaled"), u / w, cfg)
    out.append(ResidualReport.compare("duality_laplace_scaled", M, r2.value / w, tol, r2.n_evals))

    # M = N[exp(-v omega/x) f(x) / ((x/omega)^m + omega^m)^rho](u, omega)
    r3 = natural(FuncHandle(scaled, label="natural-form"), u, w, cfg)
    out.append(ResidualReport.compare("duality_natural", M, r3.value, tol, r3.n_evals))

    if u.imag == 0 and u.real > 0:
        # M = (1/u) S[...](omega/u); Sumudu with omega/u rescales the same integrand
        r4 = sumudu(FuncHandle(scaled, label="sumudu-form"), w / u.real, cfg)
        out.append(ResidualReport.compare("duality_sumudu", M, r4.value / u.real, tol, r4.n_evals))

    # M_rho[((x/omega)^m + omega^m)^rho f](u,v,omega) = N[exp(-v omega/x) f](u, omega)
    lhs = m_transform(f, p, cfg, log_weight=lambda x: rho * log_pow_sum(x, m, w))
    rhs = natural(FuncHandle(lambda x: np.exp(-v * w / x) * f(x), label="e^{-v w/x} f"), u, w, cfg)
    out.append(ResidualReport.compare("eliminate_to_natural", lhs.value, rhs.value, tol,
                                      lhs.n_evals + rhs.n_evals))

    # M_rho[((x/omega)^m + omega^m)^rho exp(v omega/x) f](u,v,omega) = L[f(omega x)](u)
    lhs = m_transform(f, p, cfg,
                      log_weight=lambda x: rho * log_pow_sum(x, m, w) + (v / x if v != 0 else 0.0))
    rhs = laplace(FuncHandle(lambda x: f(w * x), label="f(omega x)"), u, cfg)
    out.append(ResidualReport.compare("duality_laplace_weighted", lhs.value, rhs.value, tol,
                                      lhs.n_evals + rhs.n_evals))

    if rho == 0 and p.v_exactly_zero:
        nat = natural(f, u, w, cfg)
        out.append(ResidualReport.compare("reduction_natural", M, nat.value, tol, nat.n_evals))
    return out
