"""The identity suite behind ``gmtransform verify``.

Every check returns ``ResidualReport`` records; groups can be selected by
name and a global tolerance override re-judges every report.
"""
from __future__ import annotations

import numpy as np

from .corpus import CORPUS, exp_decay, gaussian, t_exp, unit
from .identities import (convolution_theorem, parseval, parseval_mixed, relation_borel,
                         relation_laplace, relation_mellin, relation_natural)
from .laplace_inv import m_inverse
from .mtransform import MParams, duality_residuals, m_transform, m_transform_many
from .quad import QuadConfig
from .report import ResidualReport
from .rules import (apply_elimination, apply_scaling, image_exponential, image_power,
                    image_power_exponential, m_derivative, m_derivative_weighted,
                    table1_residuals)

__all__ = ["GROUPS", "run_suite", "inversion_roundtrip", "image_residuals"]

TIGHT = QuadConfig(rel_tol=1e-13, abs_tol=1e-300)
P_BASE = MParams(rho=1, m=1, u=2, v=0.5, omega=1)
P_ALT = MParams(rho=0.5, m=2, u=1.5, v=0.3, omega=1.3)


def inversion_roundtrip(f, p: MParams, xs, tol: float = 1e-5, label: str = "f") -> list[ResidualReport]:
    """``m_inverse`` of the quadrature image of ``f`` against ``f`` itself."""
    out = []
    for x in xs:
        got = m_inverse(lambda u: m_transform_many(f, p, u=u, cfg=TIGHT), float(x), p)
        want = complex(np.asarray(f(np.array([float(x)])))[0])
        out.append(ResidualReport.compare(f"inversion_{label}(x={x:g})", got, want, tol))
    return out


def image_residuals(tol: float = 1e-6) -> list[ResidualReport]:
    """Closed-form images against direct quadrature on a small grid."""
    out = []
    for m in (1, 2):
        for rho in (0.5, 1.0, 2.0):
            for v in (0.0, 0.5, 1.0):
                p = MParams(rho=rho, m=m, u=1.5, v=v, omega=1.2)
                tag = f"(m={m},rho={rho:g},v={v:g})"
                lam, a = 1.5, 0.7
                out.append(ResidualReport.compare(
                    "image_power" + tag, image_power(lam, p),
                    m_transform(lambda x: x ** (lam - 1), p, TIGHT).value, tol))
                out.append(ResidualReport.compare(
                    "image_exponential" + tag, image_exponential(a, p),
                    m_transform(lambda x: np.exp(-a * x), p, TIGHT).value, tol))
                out.append(ResidualReport.compare(
                    "image_power_exponential" + tag, image_power_exponential(lam, a, p),
                    m_transform(lambda x: x ** (lam - 1) * np.exp(-a * x), p, TIGHT).value, tol))
    return out


def _duality():
    out = []
    for p in (P_BASE, P_ALT, MParams(rho=0, m=1, u=2, v=0, omega=1)):
        for name, f in CORPUS.items():
            out += [r for r in duality_residuals(f, p)]
    return out


def _scaling():
    return [apply_scaling(f, alpha, p) for f in CORPUS.values()
            for alpha in (0.5, 2.0) for p in (P_BASE, P_ALT)]


def _elimination():
    out = []
    for f in CORPUS.values():
        for p, eta in ((P_BASE, 1.0), (P_ALT, 0.25)):
            out += apply_elimination(f, eta, p)
    return out


def _table1():
    out = []
    for f in CORPUS.values():
        for n in (1, 2):
            out += table1_residuals(f, n, 0.7, P_ALT)
    return out


def _derivatives():
    out = []
    for f in CORPUS.values():
        for n in (1, 2):
            out.append(m_derivative(f, n, P_BASE)[1])
            out.append(m_derivative(f, n, MParams(rho=0.7, m=2, u=2, v=0, omega=1.3))[1])
            out.append(m_derivative_weighted(f, n, 0.5, P_BASE)[1])
    return out


def _parseval():
    return [
        parseval(exp_decay, exp_decay, 1, 1, P_BASE),
        parseval(gaussian, t_exp, 1, 0.5, MParams(rho=1, m=2, u=2, v=0.5, omega=1.3)),
        parseval(gaussian, t_exp, 0, 0, MParams(rho=0, m=1, u=2, v=0, omega=1)),
        parseval_mixed(exp_decay, exp_decay, 1, 1, 1, MParams(rho=1, m=1, u=1, v=0, omega=1)),
        parseval_mixed(gaussian, t_exp, 0.5, 1, 1.5, MParams(rho=1, m=2, u=1, v=0, omega=1.4)),
    ]


def _relations():
    p2 = MParams(rho=0.5, m=2, u=1, v=0.3, omega=1.5)
    return [
        relation_natural(exp_decay, exp_decay, 1, P_BASE),
        relation_natural(gaussian, t_exp, 0.7, p2),
        relation_laplace(exp_decay, exp_decay, 1, P_BASE),
        relation_laplace(gaussian, t_exp, 0.7, p2),
        relation_mellin(exp_decay, 1, 0.5, P_BASE),
        relation_mellin(t_exp, 1, 0.3 + 0.2j, MParams(rho=2, m=2, u=1, v=0.3, omega=0.8)),
        relation_borel(exp_decay, 1, 1, 1, P_BASE),
        relation_borel(exp_decay, 1, 2, 0.5, P_BASE),
        relation_borel(t_exp, 1.5, 1.5, 0.8, MParams(rho=1, m=2, u=2, v=0.5, omega=1.2)),
    ]


def _convolution():
    return [
        convolution_theorem(exp_decay, exp_decay, P_BASE),
        convolution_theorem(gaussian, t_exp, MParams(rho=0.5, m=2, u=1.5, v=0.5, omega=1.3)),
        convolution_theorem(unit, unit, MParams(rho=0, m=1, u=2, v=0, omega=1)),
    ]


def _inversion():
    out = []
    p = MParams(rho=1, m=1, v=1, omega=2)
    xs = np.linspace(0.1 * p.omega, 5.0, 10)
    for name, f in CORPUS.items():
        out += inversion_roundtrip(f, p, xs, label=name)
    return out


GROUPS = {
    "duality": _duality,
    "scaling": _scaling,
    "elimination": _elimination,
    "table1": _table1,
    "derivatives": _derivatives,
    "images": image_residuals,
    "parseval": _parseval,
    "relations": _relations,
    "convolution": _convolution,
    "inversion": _inversion,
}


def run_suite(only=None, tol: float | None = None) -> list[ResidualReport]:
    """Run the selected groups (all by default) in a fixed order."""
    names = list(GROUPS) if not only else [only] if isinstance(only, str) else list(only)
    unknown = [n for n in names if n not in GROUPS]
    if unknown:
        raise KeyError(f"unknown suite group(s): {', '.join(unknown)}")
    reports = []
    for name in names:
        reports += GROUPS[name]()
    if tol is not None:
        reports = [r.with_tol(tol) for r in reports]
    return reports
