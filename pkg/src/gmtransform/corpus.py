"""Fixed test-function corpus with hand-checked growth certificates and
analytic derivatives up to order four."""
from __future__ import annotations

import numpy as np

from .mtransform import FuncHandle, GrowthBound

__all__ = ["exp_decay", "gaussian", "t_exp", "unit", "CORPUS"]


def _e(x):
    return np.exp(-x)


exp_decay = FuncHandle(
    _e, GrowthBound(1.0, 1e6),
    (_e, lambda x: -_e(x), _e, lambda x: -_e(x), _e), "exp(-x)")


def _g(x):
    return np.exp(-x * x)


# derivatives of exp(-x^2) via Hermite polynomials
gaussian = FuncHandle(
    _g, GrowthBound(1.0, 1e6),
    (_g,
     lambda x: -2 * x * _g(x),
     lambda x: (4 * x * x - 2) * _g(x),
     lambda x: (-8 * x ** 3 + 12 * x) * _g(x),
     lambda x: (16 * x ** 4 - 48 * x * x + 12) * _g(x)),
    "exp(-x^2)")

t_exp = FuncHandle(
    lambda x: x * _e(x), GrowthBound(1.0, 1e6),
    (lambda x: x * _e(x),
     lambda x: (1 - x) * _e(x),
     lambda x: (x - 2) * _e(x),
     lambda x: (3 - x) * _e(x),
     lambda x: (x - 4) * _e(x)),
    "x*exp(-x)")


def _one(x):
    return np.ones(np.shape(x))


def _zero(x):
    return np.zeros(np.shape(x))


unit = FuncHandle(_one, GrowthBound(1.0, 1e6), (_one, _zero, _zero, _zero, _zero), "1")

CORPUS = {"exp": exp_decay, "gauss": gaussian, "texp": t_exp}
