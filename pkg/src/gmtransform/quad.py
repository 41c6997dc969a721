"""Numerical integration engine.

Three families of rules live here:

* double-exponential trapezoid rules (exp-sinh / log map on (0, inf),
  tanh-sinh on finite intervals) with level doubling,
* adaptive Gauss-Kronrod (G7/K15) bisection on finite intervals,
* the trapezoid rule along a vertical line ``Re z = c`` for
  Mellin-Barnes integrals.

Integrands are vectorized: they receive a 1-D ``ndarray`` of nodes and return
an array of the same length.  The double-exponential rules additionally
accept *batched* integrands returning shape ``(K, N)``; the result value is
then a length-``K`` array and convergence is required component-wise.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import BudgetExceeded, NonFinite, TailNotDecaying

__all__ = [
    "QuadConfig",
    "QuadResult",
    "integrate_semi_infinite",
    "integrate_finite",
    "integrate_tanh_sinh",
    "integrate_vertical_line",
    "integrate_vertical_line_adaptive",
]

_EPS = np.finfo(float).eps
# terms below this fraction of the peak term are treated as tail
_SIGNIFICANT = 1e-17


@dataclass(frozen=True)
class QuadConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_levels: int = 12
    max_evals: int = 200_000

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "max_levels", "max_evals"):
            if not getattr(self, name) > 0:
                raise ValueError(f"QuadConfig.{name} must be positive")
        if self.max_levels > 20:
            raise ValueError("QuadConfig.max_levels must be <= 20")


DEFAULT = QuadConfig()


@dataclass
class QuadResult:
    value: complex | np.ndarray
    abs_err_est: float | np.ndarray
    n_evals: int
    converged: bool

    def __complex__(self):
        return complex(self.value)


def _as_cfg(cfg):
    return DEFAULT if cfg is None else cfg


def _scalarize(value, err, batched):
    if batched:
        return value, err
    v = complex(value[0])
    return (v.real if v.imag == 0.0 else v), float(err[0])


# ---------------------------------------------------------------------------
# double-exponential trapezoid core
# ---------------------------------------------------------------------------

def _eval_terms(fun_t, t):
    with np.errstate(all="ignore"):
        terms = np.asarray(fun_t(t))
    return terms


def _de_trapezoid(fun_t, T, h0, cfg, what):
    """Level-doubling trapezoid sum of ``fun_t`` over ``[-T, T]``.

    ``fun_t(t)`` returns the already-weighted terms ``phi'(t) f(phi(t))``.
    Nodes whose terms are negligible at level 0 bound the refinement window;
    non-finite terms outside that window are dropped (endpoint behaviour),
    inside it they are a hard error.
    """
    J = int(math.ceil(T / h0))
    t0 = h0 * np.arange(-J, J + 1, dtype=float)
    terms = _eval_terms(fun_t, t0)
    batched = terms.ndim == 2
    terms = np.atleast_2d(terms)
    n_evals = t0.size

    finite = np.isfinite(terms)
    mag = np.where(finite, np.abs(terms), 0.0)
    peak = mag.max(axis=1, keepdims=True)
    sig = (mag > _SIGNIFICANT * peak) & (peak > 0)
    any_sig = sig.any(axis=0)
    if not any_sig.any():
        # integrand vanishes on the coarse grid; probe one refinement level
        lo_i, hi_i = 0, t0.size - 1
    else:
        idx = np.flatnonzero(any_sig)
        lo_i, hi_i = int(idx[0]), int(idx[-1])
    bad = ~finite
    if bad[:, lo_i:hi_i + 1].any():
        j = lo_i + int(np.flatnonzero(bad[:, lo_i:hi_i + 1].any(axis=0))[0])
        raise NonFinite(f"{what}: non-finite integrand at interior node t={t0[j]:.6g}")
    for edge in (lo_i - 1, hi_i + 1):
        if 0 <= edge < t0.size and bad[:, edge].any() and any_sig.any():
            raise NonFinite(
                f"{what}: integrand non-finite next to significant values (t={t0[edge]:.6g})")
    terms = np.where(finite, terms, 0.0)
    t_lo, t_hi = t0[lo_i], t0[hi_i]
    if any_sig.any():
        w_lo, w_hi = t_lo - h0, t_hi + h0
    else:
        # nothing to widen towards; stay inside the coarse grid where the map is finite
        w_lo, w_hi = t_lo, t_hi

    running = terms.sum(axis=1)
    l1 = np.abs(terms).sum(axis=1)
    S_prev = h0 * running
    err = np.full(S_prev.shape, np.inf)
    h = h0
    for level in range(1, cfg.max_levels + 1):
        h = h / 2.0
        k_lo = math.ceil((w_lo / h - 1) / 2)
        k_hi = math.floor((w_hi / h - 1) / 2)
        t_new = (2 * np.arange(k_lo, k_hi + 1, dtype=float) + 1) * h
        if n_evals + t_new.size > cfg.max_evals:
            value, e = _scalarize(S_prev, err, batched)
            raise BudgetExceeded(f"{what}: max_evals={cfg.max_evals} reached",
                                 QuadResult(value, e, n_evals, False))
        new = np.atleast_2d(_eval_terms(fun_t, t_new))
        n_evals += t_new.size
        fin = np.isfinite(new)
        if not fin.all():
            inside = (t_new >= t_lo) & (t_new <= t_hi)
            if (~fin[:, inside]).any():
                raise NonFinite(f"{what}: non-finite integrand inside the support")
            new = np.where(fin, new, 0.0)
        running = running + new.sum(axis=1)
        l1 = l1 + np.abs(new).sum(axis=1)
        S = h * running
        err = np.abs(S - S_prev)
        tol = np.maximum.reduce([
            np.full(S.shape, cfg.abs_tol),
            cfg.rel_tol * np.abs(S),
            64 * _EPS * h * l1,
        ])
        S_prev = S
        if level >= 2 and np.all(err <= tol):
            value, e = _scalarize(S, err, batched)
            return QuadResult(value, e, n_evals, True)
    value, e = _scalarize(S_prev, err, batched)
    raise BudgetExceeded(f"{what}: max_levels={cfg.max_levels} exhausted without convergence",
                         QuadResult(value, e, n_evals, False))


def integrate_semi_infinite(f: Callable, cfg: QuadConfig | None = None, *,
                            mapping: str = "exp_sinh", scale: float = 1.0) -> QuadResult:
    """Integrate ``f`` over (0, inf).

    ``mapping="exp_sinh"`` uses ``x = scale*exp(pi/2 sinh t)``, suited to
    integrands with algebraic or exponential behaviour at the ends.
    ``mapping="log"`` uses ``x = scale*exp(t)``; it is the better choice when
    ``f`` already decays double-exponentially in ``log x`` at both ends,
    e.g. ``exp(-x - b/x)``.
    """
    cfg = _as_cfg(cfg)
    if mapping == "exp_sinh":
        half_pi = 0.5 * math.pi

        def fun_t(t):
            s = half_pi * np.sinh(t)
            x = scale * np.exp(s)
            return f(x) * (x * half_pi * np.cosh(t))

        return _de_trapezoid(fun_t, 6.4, 0.5, cfg, "integrate_semi_infinite")
    if mapping == "log":
        def fun_t(t):
            x = scale * np.exp(t)
            return f(x) * x

        return _de_trapezoid(fun_t, 230.0, 0.5, cfg, "integrate_semi_infinite")
    raise ValueError(f"unknown mapping {mapping!r}")


def integrate_tanh_sinh(f: Callable, a: float, b: float,
                        cfg: QuadConfig | None = None) -> QuadResult:
    """Tanh-sinh rule on [a, b]; tolerant of integrable endpoint singularities."""
    cfg = _as_cfg(cfg)
    if not a < b:
        raise ValueError("integrate_tanh_sinh requires a < b")
    width = b - a

    def fun_t(t):
        y = math.pi * np.sinh(t)
        with np.errstate(over="ignore"):
            lo = 1.0 / (1.0 + np.exp(y))    # distance fraction from b
            hi = 1.0 / (1.0 + np.exp(-y))   # distance fraction from a
        x = np.where(t < 0, a + width * hi, b - width * lo)
        w = width * math.pi * np.cosh(t) * lo * hi
        return f(x) * w

    return _de_trapezoid(fun_t, 4.0, 0.5, cfg, "integrate_tanh_sinh")


# ---------------------------------------------------------------------------
# adaptive Gauss-Kronrod
# ---------------------------------------------------------------------------

_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])          # 15 nodes
_KW = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GW = np.zeros(15)
_GW[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


def _gk15(f, a, b):
    c, r = 0.5 * (a + b), 0.5 * (b - a)
    with np.errstate(all="ignore"):
        fx = np.asarray(f(c + r * _NODES))
    if not np.all(np.isfinite(fx)):
        raise NonFinite(f"integrate_finite: non-finite integrand on [{a:.6g}, {b:.6g}]")
    k = r * np.dot(_KW, fx)
    g = r * np.dot(_GW, fx)
    return k, abs(k - g)


def _probe_finite(f, x):
    try:
        with np.errstate(all="ignore"):
            y = np.asarray(f(np.array([x], dtype=float)))
        return bool(np.all(np.isfinite(y)))
    except (ArithmeticError, ValueError):
        return False


def integrate_finite(f: Callable, a: float, b: float,
                     cfg: QuadConfig | None = None) -> QuadResult:
    """Adaptive G7/K15 on [a, b].

    If ``f`` is non-finite at an endpoint the whole interval is handed to the
    tanh-sinh rule, whose nodes never touch the endpoints.
    """
    cfg = _as_cfg(cfg)
    a, b = float(a), float(b)
    if not a < b:
        raise ValueError("integrate_finite requires a < b")
    if not (_probe_finite(f, a) and _probe_finite(f, b)):
        return integrate_tanh_sinh(f, a, b, cfg)

    val, err = _gk15(f, a, b)
    n_evals = 15
    heap = [(-err, a, b, val, err)]
    total, total_err = val, err
    while True:
        tol = max(cfg.abs_tol, cfg.rel_tol * abs(total))
        if total_err <= tol:
            return QuadResult(_clean(total), total_err, n_evals, True)
        if n_evals + 30 > cfg.max_evals:
            raise BudgetExceeded("integrate_finite: max_evals reached",
                                 QuadResult(_clean(total), total_err, n_evals, False))
        _, lo, hi, v, e = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            raise BudgetExceeded("integrate_finite: interval cannot be bisected further",
                                 QuadResult(_clean(total), total_err, n_evals, False))
        v1, e1 = _gk15(f, lo, mid)
        v2, e2 = _gk15(f, mid, hi)
        n_evals += 30
        total += v1 + v2 - v
        total_err += e1 + e2 - e
        heapq.heappush(heap, (-e1, lo, mid, v1, e1))
        heapq.heappush(heap, (-e2, mid, hi, v2, e2))
        if len(heap) % 64 == 0:
            # refresh the running sums to stop drift from the incremental updates
            total = sum(item[3] for item in heap)
            total_err = sum(item[4] for item in heap)


def _clean(v):
    v = complex(v)
    return v.real if v.imag == 0.0 else v


# ---------------------------------------------------------------------------
# vertical-line (Mellin-Barnes) integrals
# ---------------------------------------------------------------------------

def _edge_check(g_edges, value, h):
    tail = float(np.max(np.abs(g_edges))) / (2 * math.pi)
    if tail > 1e-3 * abs(value) and tail > 0:
        raise TailNotDecaying(
            f"|g| at the truncation edge ({tail:.3e}) is not small against the integral "
            f"({abs(value):.3e})", QuadResult(value, tail, 0, False))
    return tail


def integrate_vertical_line(g: Callable, c: float, t_max: float, n: int) -> QuadResult:
    """``(1/2 pi i) * integral of g(z) dz`` over ``c - i t_max .. c + i t_max``.

    Plain trapezoid rule on ``n`` equispaced nodes.  The error estimate is the
    truncation-edge magnitude.
    """
    if n < 2:
        raise ValueError("need at least two nodes")
    tau = np.linspace(-t_max, t_max, n)
    with np.errstate(all="ignore"):
        vals = np.asarray(g(c + 1j * tau), dtype=complex)
    if not np.all(np.isfinite(vals)):
        raise NonFinite("integrate_vertical_line: non-finite integrand on the contour")
    h = tau[1] - tau[0]
    s = vals.sum() - 0.5 * (vals[0] + vals[-1])
    value = _clean(h * s / (2 * math.pi))
    tail = _edge_check(vals[[0, -1]], value, h)
    return QuadResult(value, tail, n, True)


def integrate_vertical_line_adaptive(g: Callable, c: float, t_max: float, *,
                                     rel_tol: float = 1e-12, abs_tol: float = 1e-300,
                                     n_start: int = 257, n_max: int = 2 ** 15 + 1) -> QuadResult:
    """Trapezoid rule along ``Re z = c`` with nested node doubling.

    Previously computed nodes are reused, so ``g`` is called only on new
    midpoints at each level.  ``g`` may be expensive (it may itself run a
    quadrature per node).
    """
    n = n_start
    tau = np.linspace(-t_max, t_max, n)
    with np.errstate(all="ignore"):
        vals = np.asarray(g(c + 1j * tau), dtype=complex)
    if not np.all(np.isfinite(vals)):
        raise NonFinite("integrate_vertical_line: non-finite integrand on the contour")
    edges = vals[[0, -1]]
    h = tau[1] - tau[0]
    running = vals.sum() - 0.5 * (edges[0] + edges[1])
    l1 = np.abs(vals).sum()
    prev = h * running / (2 * math.pi)
    n_evals = n
    while True:
        h_new = h / 2
        mids = -t_max + h_new * (2 * np.arange(n - 1) + 1)
        if 2 * n - 1 > n_max:
            raise BudgetExceeded("integrate_vertical_line: node budget exhausted",
                                 QuadResult(_clean(prev), float("inf"), n_evals, False))
        with np.errstate(all="ignore"):
            mv = np.asarray(g(c + 1j * mids), dtype=complex)
        if not np.all(np.isfinite(mv)):
            raise NonFinite("integrate_vertical_line: non-finite integrand on the contour")
        n_evals += mids.size
        running = running + mv.sum()
        l1 = l1 + np.abs(mv).sum()
        n = 2 * n - 1
        h = h_new
        cur = h * running / (2 * math.pi)
        err = abs(cur - prev)
        floor = 64 * _EPS * h * l1 / (2 * math.pi)
        prev = cur
        if err <= max(abs_tol, rel_tol * abs(cur), floor):
            value = _clean(cur)
            tail = _edge_check(edges, value, h)
            return QuadResult(value, err + tail, n_evals, True)
