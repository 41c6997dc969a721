"""A small expression language for test functions f(x).

Grammar (lowest to highest precedence)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          # right-associative, constant exponent
    atom   := NUMBER | 'x' | 'pi' | FUNC '(' expr ')' | '(' expr ')'
    FUNC   := exp | sin | cos | sqrt | log

Expressions are immutable trees.  ``fmt`` prints the canonical form and
``parse(fmt(e)) == e`` for every tree the parser can produce.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import EvalDomainError, ExprSyntaxError, GrowthCertificateViolated, UnsupportedOrder
from .mtransform import FuncHandle, GrowthBound

__all__ = [
    "Expr", "Num", "Var", "Neg", "Add", "Sub", "Mul", "Div", "Pow", "Exp", "Sin", "Cos",
    "Sqrt", "Log", "parse", "fmt", "evaluate", "compile_expr", "differentiate", "simplify",
    "to_handle", "check_growth", "MAX_ORDER",
]

MAX_ORDER = 4


class Expr:
    __slots__ = ()
    prec = 5

    def __str__(self):
        return fmt(self)


@dataclass(frozen=True, repr=False)
class Num(Expr):
    value: float

    def __repr__(self):
        return _num_text(self.value)


@dataclass(frozen=True, repr=False)
class Var(Expr):
    def __repr__(self):
        return "Var"


@dataclass(frozen=True, repr=False)
class Neg(Expr):
    arg: Expr
    prec = 3

    def __repr__(self):
        return f"Neg({self.arg!r})"


@dataclass(frozen=True, repr=False)
class _Binary(Expr):
    left: Expr
    right: Expr

    def __repr__(self):
        return f"{type(self).__name__}({self.left!r},{self.right!r})"


class Add(_Binary):
    prec, sym = 1, "+"


class Sub(_Binary):
    prec, sym = 1, "-"


class Mul(_Binary):
    prec, sym = 2, "*"


class Div(_Binary):
    prec, sym = 2, "/"


class Pow(_Binary):
    prec, sym = 4, "^"


@dataclass(frozen=True, repr=False)
class _Call(Expr):
    arg: Expr

    def __repr__(self):
        return f"{type(self).__name__}({self.arg!r})"


class Exp(_Call):
    name = "exp"


class Sin(_Call):
    name = "sin"


class Cos(_Call):
    name = "cos"


class Sqrt(_Call):
    name = "sqrt"


class Log(_Call):
    name = "log"


FUNCS = {c.name: c for c in (Exp, Sin, Cos, Sqrt, Log)}
X = Var()
ZERO, ONE, TWO = Num(0.0), Num(1.0), Num(2.0)


# ---------------------------------------------------------------------------
# printing
# ---------------------------------------------------------------------------

def _num_text(v: float) -> str:
    if float(v).is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(float(v))


def fmt(e: Expr) -> str:
    """Canonical text with the minimal parentheses needed to re-parse ``e``."""
    if isinstance(e, Num):
        return _num_text(e.value)
    if isinstance(e, Var):
        return "x"
    if isinstance(e, _Call):
        return f"{e.name}({fmt(e.arg)})"
    if isinstance(e, Neg):
        inner = fmt(e.arg)
        return "-" + (f"({inner})" if e.arg.prec < Neg.prec else inner)
    if isinstance(e, Pow):
        left = fmt(e.left)
        if e.left.prec <= Pow.prec or (isinstance(e.left, Num) and e.left.value < 0):
            left = f"({left})"
        right = fmt(e.right)
        if e.right.prec < Neg.prec:
            right = f"({right})"
        return f"{left}^{right}"
    left, right = fmt(e.left), fmt(e.right)
    if e.left.prec < e.prec:
        left = f"({left})"
    if e.right.prec <= e.prec:
        right = f"({right})"
    return f"{left}{e.sym}{right}"


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
                    r"|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))")


def _tokenize(src: str):
    toks, pos = [], 0
    while True:
        m = _TOKEN.match(src, pos)
        if m is None:
            if src[pos:].strip():
                off = pos + len(src[pos:]) - len(src[pos:].lstrip())
                raise ExprSyntaxError(f"unexpected character {src[off]!r}", off,
                                      ("number", "name", "operator"))
            toks.append(("end", "", len(src)))
            return toks
        kind = m.lastgroup
        toks.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()


class _Parser:
    def __init__(self, src: str):
        self.toks = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, expected):
        kind, text, off = self.peek()
        what = "end of input" if kind == "end" else repr(text)
        raise ExprSyntaxError(f"unexpected {what}", off, expected)

    def expect(self, text):
        if self.peek()[1] != text:
            self.fail((text,))
        self.take()

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = (Add if op == "+" else Sub)(node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = (Mul if op == "*" else Div)(node, self.unary())
        return node

    def unary(self):
        if self.peek()[1] == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] != "^":
            return base
        off = self.take()[2]
        expo = self.unary()
        if _depends_on_x(expo):
            raise ExprSyntaxError("exponent must be constant", off + 1, ("constant",))
        return Pow(base, expo)

    _ATOM_START = ("number", "x", "pi", "(") + tuple(FUNCS)

    def atom(self):
        kind, text, off = self.peek()
        if kind == "num":
            self.take()
            return Num(float(text))
        if kind == "name":
            if text == "x":
                self.take()
                return X
            if text == "pi":
                self.take()
                return Num(math.pi)
            if text in FUNCS:
                self.take()
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return FUNCS[text](arg)
            raise ExprSyntaxError(f"unknown name {text!r}", off, self._ATOM_START)
        if text == "(":
            self.take()
            node = self.expr()
            self.expect(")")
            return node
        self.fail(self._ATOM_START)


def parse(src: str) -> Expr:
    """Parse ``src``; raises ``ExprSyntaxError`` carrying the byte offset."""
    try:
        p = _Parser(src)
        node = p.expr()
        if p.peek()[0] != "end":
            p.fail(("+", "-", "*", "/", "^", "end of input"))
    except ExprSyntaxError as exc:
        nbytes = len(src[:exc.offset].encode("utf-8"))
        if nbytes != exc.offset:
            msg = str(exc).rsplit(" at offset ", 1)[0]
            raise ExprSyntaxError(msg, nbytes, exc.expected) from None
        raise
    return node


def _depends_on_x(e: Expr) -> bool:
    if isinstance(e, Var):
        return True
    if isinstance(e, Num):
        return False
    if isinstance(e, (Neg, _Call)):
        return _depends_on_x(e.arg)
    return _depends_on_x(e.left) or _depends_on_x(e.right)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def _domain(ok, what):
    if not np.all(ok):
        raise EvalDomainError(what)


# Real arguments are checked against the real domain; complex arguments (used
# when an image is evaluated at inversion nodes) take the principal branch.

def _log(a):
    if not np.iscomplexobj(a):
        _domain(a > 0, "log of a nonpositive number")
    return np.log(a)


def _sqrt(a):
    if not np.iscomplexobj(a):
        _domain(a >= 0, "sqrt of a negative number")
    return np.sqrt(a)


def _div(a, b):
    _domain(b != 0, "division by zero")
    return a / b


def _pow(a, c):
    if not np.iscomplexobj(a) and not float(c).is_integer():
        _domain(a >= 0, "non-integer power of a negative number")
    if c < 0:
        _domain(a != 0, "negative power of zero")
    return np.power(a, c)


_UNARY = {Exp: np.exp, Sin: np.sin, Cos: np.cos, Sqrt: _sqrt, Log: _log}
_BINARY = {Add: np.add, Sub: np.subtract, Mul: np.multiply, Div: _div}


def compile_expr(e: Expr) -> Callable:
    """Closure tree evaluating ``e`` on numpy arrays."""
    if isinstance(e, Num):
        v = e.value
        return lambda x: np.full(np.shape(x), v)
    if isinstance(e, Var):
        return lambda x: np.asarray(x) if np.iscomplexobj(x) else np.asarray(x, dtype=float)
    if isinstance(e, Neg):
        a = compile_expr(e.arg)
        return lambda x: -a(x)
    if isinstance(e, _Call):
        a, fn = compile_expr(e.arg), _UNARY[type(e)]
        return lambda x: fn(a(x))
    if isinstance(e, Pow):
        a, c = compile_expr(e.left), _const_value(e.right)
        return lambda x: _pow(a(x), c)
    a, b, fn = compile_expr(e.left), compile_expr(e.right), _BINARY[type(e)]
    return lambda x: fn(a(x), b(x))


def evaluate(e: Expr, x):
    with np.errstate(over="ignore", under="ignore"):
        out = compile_expr(e)(x)
    return out if np.ndim(out) else float(out)


# ---------------------------------------------------------------------------
# differentiation
# ---------------------------------------------------------------------------

def _const_value(e: Expr) -> float | None:
    """Value of a closed constant expression, else None."""
    if _depends_on_x(e):
        return None
    return float(compile_expr(e)(0.0))


def _num(v: float) -> Expr:
    return Neg(Num(-v)) if v < 0 else Num(float(v))


def _is(e, v):
    return isinstance(e, Num) and e.value == v


def simplify(e: Expr) -> Expr:
    """Constant folding plus 0/1 elimination and sign hoisting."""
    if isinstance(e, (Num, Var)):
        return e
    if isinstance(e, Neg):
        a = simplify(e.arg)
        if isinstance(a, Neg):
            return a.arg
        if _is(a, 0.0):
            return ZERO
        return Neg(a)
    if isinstance(e, _Call):
        a = simplify(e.arg)
        if isinstance(a, Num) and type(e) in (Exp, Sin, Cos):
            return _num(float(_UNARY[type(e)](a.value)))
        return type(e)(a)
    a, b = simplify(e.left), simplify(e.right)
    ca = a.value if isinstance(a, Num) else None
    cb = b.value if isinstance(b, Num) else None
    if isinstance(e, Add):
        if ca == 0:
            return b
        if cb == 0:
            return a
        if ca is not None and cb is not None:
            return _num(ca + cb)
        if isinstance(b, Neg):
            return simplify(Sub(a, b.arg))
        return Add(a, b)
    if isinstance(e, Sub):
        if cb == 0:
            return a
        if ca == 0:
            return simplify(Neg(b))
        if ca is not None and cb is not None:
            return _num(ca - cb)
        if isinstance(b, Neg):
            return Add(a, b.arg)
        if a == b:
            return ZERO
        return Sub(a, b)
    if isinstance(e, Mul):
        if ca == 0 or cb == 0:
            return ZERO
        if ca == 1:
            return b
        if cb == 1:
            return a
        if ca is not None and cb is not None:
            return _num(ca * cb)
        if isinstance(a, Neg):
            return simplify(Neg(Mul(a.arg, b)))
        if isinstance(b, Neg):
            return simplify(Neg(Mul(a, b.arg)))
        if cb is not None:
            return Mul(b, a)       # constants to the front
        if ca is not None and isinstance(b, Mul) and isinstance(b.left, Num):
            return Mul(_num(ca * b.left.value), b.right)
        return Mul(a, b)
    if isinstance(e, Div):
        if ca == 0:
            return ZERO
        if cb == 1:
            return a
        if ca is not None and cb is not None and cb != 0:
            return _num(ca / cb)
        if isinstance(a, Neg):
            return simplify(Neg(Div(a.arg, b)))
        return Div(a, b)
    if isinstance(e, Pow):
        c = _const_value(b)
        if c == 0:
            return ONE
        if c == 1:
            return a
        if ca is not None and not (ca == 0 and c < 0):
            return _num(ca ** c) if ca >= 0 or c.is_integer() else Pow(a, b)
        return Pow(a, b if isinstance(b, Num) or _is_neg_num(b) else _num(c))
    raise TypeError(type(e).__name__)


def _is_neg_num(e):
    return isinstance(e, Neg) and isinstance(e.arg, Num)


def _d(e: Expr) -> Expr:
    if not _depends_on_x(e):
        return ZERO
    if isinstance(e, Var):
        return ONE
    if isinstance(e, Neg):
        return Neg(_d(e.arg))
    if isinstance(e, Add):
        return Add(_d(e.left), _d(e.right))
    if isinstance(e, Sub):
        return Sub(_d(e.left), _d(e.right))
    if isinstance(e, Mul):
        return Add(Mul(_d(e.left), e.right), Mul(e.left, _d(e.right)))
    if isinstance(e, Div):
        return Div(Sub(Mul(_d(e.left), e.right), Mul(e.left, _d(e.right))), Pow(e.right, TWO))
    if isinstance(e, Pow):
        c = _const_value(e.right)
        if c == 0:
            return ZERO
        return Mul(Mul(_num(c), Pow(e.left, _num(c - 1))), _d(e.left))
    u, du = e.arg, _d(e.arg)
    if isinstance(e, Exp):
        return Mul(e, du)
    if isinstance(e, Sin):
        return Mul(Cos(u), du)
    if isinstance(e, Cos):
        return Neg(Mul(Sin(u), du))
    if isinstance(e, Sqrt):
        return Div(du, Mul(TWO, e))
    if isinstance(e, Log):
        return Div(du, u)
    raise TypeError(type(e).__name__)


def differentiate(e: Expr, order: int = 1) -> Expr:
    """Symbolic ``d^order/dx^order`` followed by ``simplify``; order <= 4."""
    if order < 0 or order != int(order):
        raise ValueError("order must be a nonnegative integer")
    if order > MAX_ORDER:
        raise UnsupportedOrder(f"derivative order {order} > {MAX_ORDER}")
    for _ in range(order):
        e = simplify(_d(e))
    return e


# ---------------------------------------------------------------------------
# handles
# ---------------------------------------------------------------------------

GROWTH_GRID = np.logspace(-3, 3, 241)


def check_growth(e: Expr, growth: GrowthBound, grid=GROWTH_GRID) -> None:
    """Reject a certificate that fails at some sampled ``x > T``."""
    xs = np.asarray(grid, dtype=float)
    xs = xs[xs > growth.T]
    with np.errstate(over="ignore", invalid="ignore"):
        vals = np.abs(evaluate(e, xs))
        bound = growth.bound(xs)
    bad = ~(vals <= bound * (1 + 1e-12))
    if np.any(bad):
        x0 = float(xs[np.argmax(bad)])
        raise GrowthCertificateViolated(
            f"|{fmt(e)}| exceeds the growth certificate at x={x0:.6g}", x0)


def to_handle(e: Expr | str, growth: GrowthBound | None = None) -> FuncHandle:
    """FuncHandle with symbolic derivatives through order 4.

    A supplied certificate is spot-checked first; ``growth=None`` skips it.
    """
    if isinstance(e, str):
        e = parse(e)
    if growth is not None:
        check_growth(e, growth)
    derivs, cur = [], e
    for k in range(MAX_ORDER + 1):
        if k:
            cur = differentiate(cur, 1)
        derivs.append(_safe(compile_expr(cur)))
    return FuncHandle(derivs[0], growth, tuple(derivs), fmt(e))


def _safe(fn):
    def wrapped(x):
        with np.errstate(over="ignore", under="ignore"):
            return fn(x)
    return wrapped
