"""Special functions: complex gamma, the extended gamma ``Gamma_b`` and
Mellin-Barnes evaluation of the extended ``H^{2,1}_{1,2}(z; b)`` and of
``H^{1,1}_{1,1}``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContourError, DomainError, PoleError
from .quad import (QuadConfig, integrate_semi_infinite, integrate_vertical_line,
                   integrate_vertical_line_adaptive)

__all__ = [
    "gamma", "loggamma", "gamma_ext", "gamma_ext_many", "euler_integral_ext",
    "ExtHParams", "ContourSpec", "h_ext_2112", "h_2112_classical",
    "h_1111", "h_1111_general", "pole_band_2112",
]

# Lanczos coefficients, g = 607/128, 14 terms (Godfrey)
_LANCZOS_G = 671.0 / 128.0  # g + 1/2
_LANCZOS_C0 = 0.999999999999997092
_LANCZOS = np.array([
    57.1562356658629235, -59.5979603554754912, 14.1360979747417471,
    -0.491913816097620199, .339946499848118887e-4, .465236289270485756e-4,
    -.983744753048795646e-4, .158088703224912494e-3, -.210264441724104883e-3,
    .217439618115212643e-3, -.164318106536763890e-3, .844182239838527433e-4,
    -.261908384015814087e-4, .368991826595316234e-5,
])
_LOG_SQRT_2PI = 0.5 * math.log(2 * math.pi)

GAMMA_EXT_CFG = QuadConfig(rel_tol=1e-13, abs_tol=1e-300, max_levels=10)


def _check_poles(z):
    re, im = z.real, z.imag
    bad = (im == 0) & (re <= 0) & (re == np.round(re))
    if np.any(bad):
        raise PoleError(f"gamma has a pole at {np.asarray(z)[bad].ravel()[0]}")


def _lanczos_log(z):
    # log Gamma(z) for Re z >= 1/2
    ser = np.full(z.shape, _LANCZOS_C0, dtype=complex)
    for j, c in enumerate(_LANCZOS):
        ser = ser + c / (z + (j + 1))
    tmp = z + _LANCZOS_G
    return (z + 0.5) * np.log(tmp) - tmp + np.log(ser / z) + _LOG_SQRT_2PI


def _log_sin_pi(z):
    # overflow-free log sin(pi z); the branch is irrelevant to callers
    w = np.pi * z
    upper = w.imag >= 0
    e = np.where(upper, np.exp(2j * w * upper), np.exp(-2j * w * ~upper))
    return np.where(upper, -1j * w + np.log(e - 1.0), 1j * w + np.log(1.0 - e)) - np.log(2j)


def loggamma(z):
    """A logarithm of Gamma(z), vectorized.

    Only ``exp(loggamma(z))`` is meaningful; for ``Re z < 1/2`` the returned
    value may differ from the principal log-gamma by multiples of 2*pi*i.
    """
    z = np.asarray(z, dtype=complex)
    _check_poles(z)
    right = z.real >= 0.5
    zr = np.where(right, z, 1.0 - z)
    lg = _lanczos_log(zr)
    refl = math.log(math.pi) - _log_sin_pi(np.where(right, 0.5, z)) - lg
    out = np.where(right, lg, refl)
    return out if out.ndim else complex(out)


def gamma(z):
    """Complex gamma function (Lanczos approximation with reflection)."""
    scalar = np.ndim(z) == 0
    z = np.asarray(z, dtype=complex)
    out = np.exp(loggamma(z))
    if scalar:
        v = complex(out)
        return v.real if (v.imag == 0 or z.imag == 0) else v
    return out


# ---------------------------------------------------------------------------
# extended gamma
# ---------------------------------------------------------------------------

def _gamma_ext_integrand(z, b):
    zm1 = np.asarray(z, dtype=complex) - 1.0

    def f(x):
        lx = np.log(x)
        if zm1.ndim:
            return np.exp(zm1[:, None] * lx - x - b / x)
        return np.exp(zm1 * lx - x - b / x)
    return f


def _check_b(b):
    if b.real < 0 or (b.real == 0 and b != 0):
        raise DomainError(f"extended gamma requires Re b > 0 or b = 0 (got b={b})")


def gamma_ext(z, b, cfg: QuadConfig | None = None):
    """Extended gamma ``int_0^inf t^(z-1) exp(-t - b/t) dt``.

    For ``b = 0`` this is the classical gamma function and ``Re z > 0`` is
    required; for ``Re b > 0`` every complex ``z`` is allowed.
    """
    b = complex(b)
    z = complex(z)
    if b == 0:
        if z.real <= 0:
            raise DomainError("gamma_ext(z, 0) requires Re z > 0")
        return gamma(z)
    _check_b(b)
    res = integrate_semi_infinite(_gamma_ext_integrand(z, b), cfg or GAMMA_EXT_CFG,
                                  mapping="log")
    return res.value


def gamma_ext_many(zs, b, cfg: QuadConfig | None = None, chunk: int = 256) -> np.ndarray:
    """Vectorized ``gamma_ext`` over an array of ``z`` at one ``b``."""
    b = complex(b)
    zs = np.asarray(zs, dtype=complex)
    shape = zs.shape
    flat = zs.ravel()
    if b == 0:
        if np.any(flat.real <= 0):
            raise DomainError("gamma_ext(z, 0) requires Re z > 0")
        return gamma(flat).reshape(shape)
    _check_b(b)
    cfg = cfg or GAMMA_EXT_CFG
    out = np.empty(flat.shape, dtype=complex)
    for i in range(0, flat.size, chunk):
        part = flat[i:i + chunk]
        res = integrate_semi_infinite(_gamma_ext_integrand(part, b), cfg, mapping="log")
        out[i:i + chunk] = res.value
    return out.reshape(shape)


def euler_integral_ext(z, sigma, b, cfg: QuadConfig | None = None):
    """``int_0^inf x^(z-1) exp(-sigma x - b/x) dx = Gamma_{sigma b}(z) / sigma^z``."""
    z, sigma, b = complex(z), complex(sigma), complex(b)
    if z.real <= 0 or sigma.real <= 0 or b.real < 0:
        raise DomainError("euler_integral_ext needs Re z > 0, Re sigma > 0, Re b >= 0")
    val = gamma_ext(z, sigma * b, cfg) / sigma ** z
    return val.real if (val.imag == 0 or (z.imag == 0 and sigma.imag == 0 and b.imag == 0)) else val


# ---------------------------------------------------------------------------
# Mellin-Barnes H-functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExtHParams:
    """Parameter rows ``(a, alpha); (b1, beta1)_b_ext, (b2, beta2)``."""
    a: complex
    alpha: float
    b1: complex
    beta1: float
    b_ext: complex
    b2: complex
    beta2: float

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta1 > 0 and self.beta2 > 0):
            raise DomainError("alpha, beta1, beta2 must be positive")
        if complex(self.b_ext).real < 0:
            raise DomainError("Re b_ext must be >= 0")

    def scaled(self, m: float) -> "ExtHParams":
        """Rows with every scale parameter divided by ``m``."""
        return ExtHParams(self.a, self.alpha / m, self.b1, self.beta1 / m,
                          self.b_ext, self.b2, self.beta2 / m)


@dataclass(frozen=True)
class ContourSpec:
    c: float
    t_max: float
    n_nodes: int = 257

    def __post_init__(self):
        if self.t_max <= 0:
            raise ValueError("t_max must be positive")
        if self.n_nodes < 64:
            raise ValueError("n_nodes must be >= 64")


def pole_band_2112(p: ExtHParams) -> tuple[float, float]:
    """Open interval of admissible abscissae ``(left, right)``."""
    right = (1.0 - complex(p.a).real) / p.alpha
    left = -complex(p.b2).real / p.beta2
    if complex(p.b_ext) == 0:
        left = max(left, -complex(p.b1).real / p.beta1)
    return left, right


def _default_abscissa(left, right):
    if not left < right:
        raise ContourError(f"pole families overlap: left {left} >= right {right}")
    return max(0.5 * (left + right), right - 1.0)


def _default_tmax(tol, scales):
    return max(40.0, 2 * abs(math.log(tol)) / math.pi * (1 + 1 / min(scales)))


def _validate_contour(spec, left, right):
    if not left < spec.c < right:
        raise ContourError(
            f"abscissa c={spec.c} not strictly between left poles ({left}) and right poles ({right})")


def _all_real(*vals):
    return all(complex(v).imag == 0 for v in vals)


def _start_nodes(spec, log_abs_z):
    # resolve the oscillation of z^{-t} (angular frequency |log|z||) from the start;
    # coarser grids can alias and pass the doubling test with a wrong value
    h = min(0.25, 2 * math.pi / (8 * max(abs(log_abs_z), 1.0)))
    n = 2 ** math.ceil(math.log2(2 * spec.t_max / h)) + 1
    return max(n, spec.n_nodes)


def _run_contour(g, spec, adaptive, rel_tol, real=False, log_abs_z=0.0):
    if adaptive:
        res = integrate_vertical_line_adaptive(g, spec.c, spec.t_max, rel_tol=rel_tol,
                                               n_start=_start_nodes(spec, log_abs_z))
    else:
        res = integrate_vertical_line(g, spec.c, spec.t_max, spec.n_nodes)
    # with real data and z > 0 the kernel is conjugate-symmetric about Im t = 0
    return complex(res.value).real if real else res.value


def _contour_for(p_left, p_right, spec, tol, scales):
    if spec is None:
        return ContourSpec(_default_abscissa(p_left, p_right), _default_tmax(tol, scales))
    _validate_contour(spec, p_left, p_right)
    return spec


def h_ext_2112(z_arg, p: ExtHParams, spec: ContourSpec | None = None, *,
               rel_tol: float = 1e-12, adaptive: bool = True,
               gamma_cfg: QuadConfig | None = None):
    """Extended ``H^{2,1}_{1,2}[z; b]`` by trapezoid quadrature on ``Re t = c``.

    Kernel ``Gamma(1-a-alpha t) Gamma_b(b1+beta1 t) Gamma(b2+beta2 t) z^{-t}``
    with the principal branch of ``z^{-t}``.  With ``b_ext = 0`` the middle
    factor is the classical gamma function.
    """
    z_arg = complex(z_arg)
    if z_arg == 0:
        raise DomainError("H-function argument must be nonzero")
    left, right = pole_band_2112(p)
    spec = _contour_for(left, right, spec, rel_tol, (p.alpha, p.beta1, p.beta2))
    log_z = np.log(z_arg)
    a, b1, b2, bext = complex(p.a), complex(p.b1), complex(p.b2), complex(p.b_ext)

    def g(t):
        outer = np.exp(loggamma(1 - a - p.alpha * t) + loggamma(b2 + p.beta2 * t) - t * log_z)
        return outer * gamma_ext_many(b1 + p.beta1 * t, bext, gamma_cfg)

    real = z_arg.imag == 0 and z_arg.real > 0 and _all_real(a, b1, b2, bext)
    return _run_contour(g, spec, adaptive, rel_tol, real, log_z.real)


def h_2112_classical(z_arg, a, alpha, b1, beta1, b2, beta2, spec: ContourSpec | None = None, *,
                     rel_tol: float = 1e-12):
    """Classical ``H^{2,1}_{1,2}`` with three ordinary gamma factors.

    Written independently of :func:`h_ext_2112` as a cross-check of its
    ``b_ext = 0`` reduction.
    """
    z_arg = complex(z_arg)
    a, b1, b2 = complex(a), complex(b1), complex(b2)
    right = (1 - a.real) / alpha
    left = max(-b1.real / beta1, -b2.real / beta2)
    spec = _contour_for(left, right, spec, rel_tol, (alpha, beta1, beta2))
    log_z = np.log(z_arg)

    def g(t):
        return np.exp(loggamma(1 - a - alpha * t) + loggamma(b1 + beta1 * t)
                      + loggamma(b2 + beta2 * t) - t * log_z)

    real = z_arg.imag == 0 and z_arg.real > 0 and _all_real(a, b1, b2)
    return _run_contour(g, spec, True, rel_tol, real, log_z.real)


def h_1111_general(y, a, alpha, b, beta, spec: ContourSpec | None = None, *,
                   rel_tol: float = 1e-12):
    """``H^{1,1}_{1,1}[y | (a, alpha); (b, beta)]`` by Mellin-Barnes quadrature."""
    y = complex(y)
    if y == 0:
        raise DomainError("H-function argument must be nonzero")
    a, b = complex(a), complex(b)
    right = (1 - a.real) / alpha
    left = -b.real / beta
    if spec is None and left < right and y.imag == 0 and y.real > 0:
        # lean towards the pole family that dominates: right for y > 1, left for y < 1
        mid, half = 0.5 * (left + right), 0.5 * (right - left)
        c = mid + 0.6 * min(half, 1.0) * math.tanh(math.log(y.real) / 5)
        spec = ContourSpec(c, _default_tmax(rel_tol, (alpha, beta)))
    spec = _contour_for(left, right, spec, rel_tol, (alpha, beta))
    log_y = np.log(y)

    def g(t):
        return np.exp(loggamma(b + beta * t) + loggamma(1 - a - alpha * t) - t * log_y)

    real = y.imag == 0 and y.real > 0 and _all_real(a, b)
    return _run_contour(g, spec, True, rel_tol, real, log_y.real)


def h_1111(y, nu, mu, spec: ContourSpec | None = None, *, rel_tol: float = 1e-12):
    """Kernel ``H^{1,1}_{1,1}[y | (1 - nu mu, 1); (0, 1/nu)]``."""
    if not (y > 0 and nu > 0 and mu > 0):
        raise DomainError("h_1111 requires y, nu, mu > 0")
    return h_1111_general(y, 1 - nu * mu, 1.0, 0.0, 1.0 / nu, spec, rel_tol=rel_tol)
