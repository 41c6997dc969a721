"""Transform-method solutions of a first-order transport IBVP and of the heat
equation with sources, each paired with a classical oracle.

Transport problem on t, x > 0::

    w_t + w_x = p(t, w) exp(-v w / t) r(t, x),   w(0, x) = w phi(w),   w(t, 0) = 0
    p(t, w) = ((t/w)^m + w^m)^(-rho)

Heat problem on (0, pi)::

    phi_t = phi_xx + (t^m + 1)^(-rho) exp(-v/t) r(x, t),   phi(x, 0) = f(x)

with zero Dirichlet data.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.integrate import trapezoid
from scipy.linalg import solve_banded

from .errors import DomainError, NonFinite, TailBoundExceeded
from .laplace_inv import BROMWICH, InversionConfig, inverse_natural
from .mtransform import MParams, log_pow_sum
from .quad import QuadConfig, integrate_finite, integrate_semi_infinite, integrate_tanh_sinh

__all__ = [
    "TransportProblem", "HeatProblem", "SeriesSolution", "HeatGrid", "FieldRow",
    "heaviside", "transport_source", "solve_transport", "transport_char_oracle",
    "transport_field", "build_heat_series", "solve_heat_series", "heat_fd_oracle",
    "write_csv",
]

NEAR_CHARACTERISTIC = 0.05
INNER_CFG = QuadConfig(rel_tol=1e-12, abs_tol=1e-300, max_levels=10)
HEAT_CFG = QuadConfig(rel_tol=1e-12, abs_tol=1e-15, max_levels=10)


def heaviside(t: float) -> float:
    """Unit step with the convention ``heaviside(0) = 1``."""
    return 1.0 if t >= 0 else 0.0


def _clean(z):
    z = complex(z)
    return z.real if z.imag == 0 else z


# ---------------------------------------------------------------------------
# transport
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TransportProblem:
    r: Callable | None
    phi_omega: complex = 0.0
    p: MParams = field(default_factory=MParams)
    x_max: float = 5.0
    t_max: float = 5.0

    def __post_init__(self):
        if complex(self.p.v).real < 0:
            raise DomainError("Re v must be >= 0")
        if self.x_max <= 0 or self.t_max <= 0:
            raise DomainError("x_max and t_max must be positive")

    @property
    def zero_source(self) -> bool:
        return self.r is None


def transport_source(prob: TransportProblem, t, x):
    """Right-hand side ``p(t,w) exp(-v w/t) r(t,x)``; zero at ``t = 0`` when Re v > 0."""
    p = prob.p
    t = np.asarray(t, dtype=float)
    w, v, rho = float(p.omega), complex(p.v), complex(p.rho)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        e = -rho * log_pow_sum(t / w, p.m, w)
        if not p.v_exactly_zero:
            e = e - v * w / t
        out = np.exp(e) * np.asarray(prob.r(t, x), dtype=complex)
    if not p.v_exactly_zero and v.real > 0:
        out = np.where(t == 0, 0.0, out)
    return out


def _check_tx(t, x):
    if t < 0 or x < 0:
        raise DomainError("t and x must be nonnegative")


def _gauss_nodes(a: float, b: float, n: int):
    z, wts = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (z + 1.0), half * wts


def _image_grid(prob: TransportProblem, us: np.ndarray, ys: np.ndarray, cfg: QuadConfig,
                chunk: int = 4096) -> np.ndarray:
    """``M_{rho,m}[r(., y)](u, v, w)`` on the tensor grid ``us x ys``."""
    p = prob.p
    w, m, v, rho = float(p.omega), p.m, complex(p.v), complex(p.rho)
    nu, ny = us.size, ys.size
    out = np.empty((nu, ny), dtype=complex)
    per = max(1, chunk // nu)
    for j in range(0, ny, per):
        yb = ys[j:j + per]

        def integrand(tau, yb=yb):
            e = -us[:, None] * tau
            if not p.v_exactly_zero:
                e = e - v / tau
            if rho != 0:
                e = e - rho * log_pow_sum(tau, m, w)
            rv = np.asarray(prob.r(w * tau[None, :], yb[:, None]), dtype=complex)
            rv = np.broadcast_to(rv, (yb.size, tau.size))
            return (np.exp(e)[:, None, :] * rv[None, :, :]).reshape(-1, tau.size)

        res = integrate_semi_infinite(integrand, cfg)
        out[:, j:j + per] = np.asarray(res.value).reshape(nu, yb.size)
    return out


def _y_nodes(x: float, t: float, inv: InversionConfig) -> int:
    # Gauss-Legendre must resolve exp(-s (x - y)) at the highest Bromwich node
    k_max = inv.n_nodes * math.pi / t
    return int(min(4096, max(48, math.ceil(0.75 * k_max * x + 48))))


def solve_transport(prob: TransportProblem, t: float, x: float,
                    inv: InversionConfig | None = None,
                    cfg: QuadConfig | None = None) -> complex:
    """Transform-method field ``w(t, x)``.

    The source part is the inverse natural transform of
    ``exp(-u x/w) int_0^x exp(u y/w) M[r(., y)](u, v, w) dy``; the data part is
    ``w phi(w) (heaviside(t) - heaviside(t - x))``.  Images are evaluated by
    quadrature, so the inversion runs on the Bromwich rule.
    """
    _check_tx(t, x)
    inv = inv or BROMWICH
    cfg = cfg or INNER_CFG
    data = complex(prob.phi_omega) * (heaviside(t) - heaviside(t - x))
    if prob.zero_source or t == 0 or x == 0:
        return _clean(data)
    w = float(prob.p.omega)
    ys, wy = _gauss_nodes(0.0, x, _y_nodes(x, t / w, inv))

    def image(u):
        u = np.asarray(u, dtype=complex)
        shape = u.shape
        uu = u.ravel()
        grid = _image_grid(prob, uu, ys, cfg)
        phase = np.exp(-uu[:, None] * (x - ys)[None, :] / w)
        return (phase * grid) @ wy if shape else complex(((phase * grid) @ wy)[0])

    src = complex(inverse_natural(image, t, w, inv))
    return _clean(src + data)


def transport_char_oracle(prob: TransportProblem, t: float, x: float,
                          dt: float = 1e-3) -> complex:
    """Trapezoid integration of the source along the characteristic through (t, x).

    The characteristic ``x - t = const`` starts on the initial line when
    ``x >= t`` (value ``w phi(w)``) and on the boundary otherwise (value 0).
    """
    _check_tx(t, x)
    start = max(0.0, t - x)
    w0 = complex(prob.phi_omega) if x >= t else 0.0
    if prob.zero_source or t == start:
        return _clean(w0)
    n = max(1, math.ceil((t - start) / dt))
    s = np.linspace(start, t, n + 1)
    vals = transport_source(prob, s, s + (x - t))
    if not np.all(np.isfinite(vals)):
        raise NonFinite("source not finite along the characteristic")
    return _clean(w0 + trapezoid(vals, s))


@dataclass(frozen=True)
class FieldRow:
    t: float
    x: float
    value: complex
    method: str
    err_flag: bool


def transport_field(prob: TransportProblem, ts: Iterable[float], xs: Iterable[float], *,
                    method: str = "transform", **kw) -> list[FieldRow]:
    """Evaluate on a grid; points within 0.05 of ``t = x`` are flagged."""
    solver = solve_transport if method == "transform" else transport_char_oracle
    rows = []
    for t in ts:
        for x in xs:
            val = complex(solver(prob, t, x, **kw))
            rows.append(FieldRow(float(t), float(x), val, method,
                                 abs(t - x) < NEAR_CHARACTERISTIC))
    return rows


def write_csv(rows: Sequence[FieldRow], path_or_file) -> None:
    """CSV with columns t, x, re(w), im(w), method, err_flag."""
    def _write(fh):
        wr = csv.writer(fh)
        wr.writerow(["t", "x", "re(w)", "im(w)", "method", "err_flag"])
        for r in rows:
            wr.writerow([repr(r.t), repr(r.x), repr(r.value.real), repr(r.value.imag),
                         r.method, int(r.err_flag)])

    if hasattr(path_or_file, "write"):
        _write(path_or_file)
    else:
        with open(path_or_file, "w", newline="") as fh:
            _write(fh)


# ---------------------------------------------------------------------------
# heat
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HeatProblem:
    f_init: Callable | None = None
    r: Callable | None = None
    rho: complex = 0.0
    m: int = 1
    v: complex = 0.0
    K_max: int = 40
    t_grid: tuple = (0.1, 0.325, 0.55, 0.775, 1.0)
    x_grid: tuple = (math.pi / 8, math.pi / 4, math.pi / 2, 3 * math.pi / 4, 7 * math.pi / 8)

    def __post_init__(self):
        if self.m < 0 or int(self.m) != self.m:
            raise DomainError("m must be a nonnegative integer")
        if self.K_max < 1:
            raise DomainError("K_max must be >= 1")
        if complex(self.v).real < 0:
            raise DomainError("Re v must be >= 0")
        if self.f_init is not None:
            ends = np.asarray(self.f_init(np.array([0.0, math.pi])), dtype=complex)
            if np.max(np.abs(ends)) > 1e-12:
                raise DomainError("f_init must vanish at 0 and pi")

    def weight(self, zeta):
        """``(zeta^m + 1)^(-rho) exp(-v/zeta)``, extended by its limit at 0."""
        zeta = np.asarray(zeta, dtype=float)
        v, rho = complex(self.v), complex(self.rho)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            e = -rho * log_pow_sum(zeta, self.m, 1.0) if rho != 0 else np.zeros(zeta.shape)
            if v != 0:
                e = e - v / zeta
            out = np.exp(e)
        if v != 0:
            out = np.where(zeta == 0, 0.0 if v.real > 0 else np.nan, out)
        return out


@dataclass
class SeriesSolution:
    fourier_coeffs: np.ndarray          # b_k of f_init, k = 1..K_max
    source_integrals: dict               # t -> array of (2/pi) int int ... e^{-k^2 (t - zeta)} ...
    K_max: int
    tail_bound: dict                     # t -> truncation estimate
    sign: str = "corrected"

    def signs(self) -> np.ndarray:
        k = np.arange(1, self.K_max + 1)
        return (-1.0) ** k if self.sign == "alternating" else np.ones(self.K_max)


SIGNS = ("corrected", "alternating")
_Y_NODES = 256


def _fourier_coeffs(f, K: int) -> np.ndarray:
    if f is None:
        return np.zeros(K, dtype=complex)
    out = np.empty(K, dtype=complex)
    for k in range(1, K + 1):
        res = integrate_finite(lambda y, k=k: np.sin(k * y) * f(y), 0.0, math.pi)
        out[k - 1] = res.value
    return 2.0 / math.pi * out


def _source_coeffs(prob: HeatProblem, t: float) -> np.ndarray:
    """``(2/pi) int_0^pi int_0^t e^{-k^2 (t-zeta)} W(zeta) r(y,zeta) sin(ky) dzeta dy``."""
    K = prob.K_max
    if prob.r is None:
        return np.zeros(K, dtype=complex)
    k = np.arange(1, K + 1, dtype=float)
    ys, wy = _gauss_nodes(0.0, math.pi, _Y_NODES)
    sin_ky = np.sin(np.outer(k, ys)) * wy          # (K, ny)

    def integrand(zeta):
        rv = np.asarray(prob.r(ys[:, None], zeta[None, :]), dtype=complex)
        rv = np.broadcast_to(rv, (ys.size, zeta.size))
        proj = sin_ky @ rv                           # (K, nz)
        decay = np.exp(-np.outer(k * k, t - zeta))
        return decay * proj * prob.weight(zeta)[None, :]

    res = integrate_tanh_sinh(integrand, 0.0, t, HEAT_CFG)
    return 2.0 / math.pi * np.asarray(res.value, dtype=complex).reshape(K)


T_MIN = 0.05


def _tail(b: np.ndarray, c: np.ndarray, t: float) -> float:
    K = b.size
    # data: geometric tail of |b_K| e^{-k^2 t}; source: coefficients decay at
    # least like 1/k^2, so the remainder is about K |c_K|
    data = abs(b[-1]) * math.exp(-K * K * t) / max(1e-300, 1.0 - math.exp(-(2 * K + 1) * t))
    src = K * max(abs(c[-1]), abs(c[-2]) if K > 1 else 0.0)
    scale = max(np.max(np.abs(b)) if b.size else 0.0, np.max(np.abs(c)) if c.size else 0.0)
    return data + src + 1e-14 * scale


def build_heat_series(prob: HeatProblem, ts: Iterable[float] | None = None, *,
                      sign: str = "corrected", t_min: float = T_MIN) -> SeriesSolution:
    """Precompute Fourier data and source integrals for the requested times.

    ``sign="alternating"`` attaches ``(-1)^k`` to every mode and is kept only
    for the sign audit; ``"corrected"`` uses ``+1``, which is what the
    eigenfunction expansion gives and what the finite-difference oracle
    confirms.
    """
    if sign not in SIGNS:
        raise ValueError(f"sign must be one of {SIGNS}")
    ts = tuple(prob.t_grid if ts is None else ts)
    for t in ts:
        if t < t_min:
            raise DomainError(f"t={t} below the validated range t >= {t_min}")
    b = _fourier_coeffs(prob.f_init, prob.K_max)
    src, tail = {}, {}
    for t in ts:
        c = _source_coeffs(prob, float(t))
        src[float(t)] = c
        tail[float(t)] = _tail(b, c, max(float(t), t_min))
    return SeriesSolution(b, src, prob.K_max, tail, sign)


def _series_value(sol: SeriesSolution, x: float, t: float) -> complex:
    k = np.arange(1, sol.K_max + 1)
    modes = np.exp(-k.astype(float) ** 2 * t) * np.sin(k * x)
    sg = sol.signs()
    return complex(np.sum(sg * sol.source_integrals[float(t)] * np.sin(k * x))
                   + np.sum(sg * sol.fourier_coeffs * modes))


def solve_heat_series(prob: HeatProblem, x: float, t: float, *, sign: str = "corrected",
                      tol: float | None = None, t_min: float = T_MIN,
                      solution: SeriesSolution | None = None) -> complex:
    """Sine-series solution at ``(x, t)``.

    Raises ``TailBoundExceeded`` when ``tol`` is given and the truncation
    estimate at ``K_max`` exceeds it.
    """
    if not 0.0 <= x <= math.pi:
        raise DomainError("x must lie in [0, pi]")
    if not t > 0:
        raise DomainError("t must be positive")
    if solution is None or float(t) not in solution.source_integrals or solution.sign != sign:
        solution = build_heat_series(prob, (t,), sign=sign, t_min=t_min)
    bound = solution.tail_bound[float(t)]
    if tol is not None and bound > tol:
        raise TailBoundExceeded(f"tail bound {bound:.2e} exceeds tol {tol:.2e} at K_max={prob.K_max}")
    return _clean(_series_value(solution, x, t))


@dataclass(frozen=True)
class HeatGrid:
    x: np.ndarray
    t: np.ndarray
    values: np.ndarray   # shape (nt+1, nx+1)

    def at(self, x: float, t: float) -> complex:
        """Bilinear interpolation on the grid."""
        i = int(np.clip(np.searchsorted(self.t, t) - 1, 0, self.t.size - 2))
        s = (t - self.t[i]) / (self.t[i + 1] - self.t[i])
        row = (1 - s) * self.values[i] + s * self.values[i + 1]
        return _clean(np.interp(x, self.x, row.real) + 1j * np.interp(x, self.x, row.imag))


def heat_fd_oracle(prob: HeatProblem, nx: int = 400, nt: int = 400,
                   t_end: float | None = None) -> HeatGrid:
    """Crank-Nicolson on ``nx`` spatial intervals and ``nt`` time steps."""
    if nx < 50 or nt < 50:
        raise DomainError("nx and nt must be >= 50")
    T = float(max(prob.t_grid) if t_end is None else t_end)
    xs = np.linspace(0.0, math.pi, nx + 1)
    ts = np.linspace(0.0, T, nt + 1)
    h, dt = xs[1] - xs[0], ts[1] - ts[0]
    xi = xs[1:-1]
    lam = dt / (2 * h * h)
    n = xi.size
    ab = np.zeros((3, n))
    ab[0, 1:] = -lam
    ab[1, :] = 1 + 2 * lam
    ab[2, :-1] = -lam

    def source(t):
        if prob.r is None:
            return np.zeros(n, dtype=complex)
        wt = prob.weight(np.array([t]))[0]
        if wt == 0:
            return np.zeros(n, dtype=complex)
        return wt * np.asarray(prob.r(xi, t), dtype=complex) * np.ones(n)

    u = np.zeros(n, dtype=complex) if prob.f_init is None else \
        np.asarray(prob.f_init(xi), dtype=complex) * np.ones(n)
    out = np.zeros((nt + 1, nx + 1), dtype=complex)
    out[0, 1:-1] = u
    s_old = source(0.0)
    for j in range(1, nt + 1):
        s_new = source(ts[j])
        rhs = (1 - 2 * lam) * u
        rhs[1:] += lam * u[:-1]
        rhs[:-1] += lam * u[1:]
        rhs += 0.5 * dt * (s_old + s_new)
        u = solve_banded((1, 1), ab, rhs)
        out[j, 1:-1] = u
        s_old = s_new
    if not np.iscomplexobj(out) or np.all(out.imag == 0):
        out = out.real
    return HeatGrid(xs, ts, out)
