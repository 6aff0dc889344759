"""Exact multivariate rational functions over Q in named chart variables.

A :class:`RationalFn` is a reduced quotient of two polynomials with rational
coefficients.  The denominator is monic in graded-lexicographic order and
coprime to the numerator, so two values compare equal exactly when they are
the same function.

Polynomial arithmetic and gcd are delegated to python-flint's
``fmpq_mpoly``; the expression grammar, printing and calculus live here.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

import flint

__all__ = [
    "Chart",
    "RationalFn",
    "ExprError",
    "ParseError",
    "UnknownVariableError",
    "ExponentError",
    "DivisionByZero",
    "PoleError",
    "ChartMismatchError",
    "parse_expr",
    "partial",
    "is_zero",
    "eval_at",
    "to_fraction",
]

_IDENT = re.compile(r"[a-zA-Z][a-zA-Z0-9_]*\Z")

Scalar = Union[int, Fraction]


class ExprError(ValueError):
    """Base class for expression errors."""


class ParseError(ExprError):
    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


class UnknownVariableError(ParseError):
    pass


class ExponentError(ParseError):
    pass


class DivisionByZero(ExprError, ZeroDivisionError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        super().__init__(message)


class PoleError(ExprError, ZeroDivisionError):
    pass


class ChartMismatchError(ValueError):
    pass


class _Ring:
    """Polynomial context plus cached constants for one chart."""

    def __init__(self, names):
        self.ctx = flint.fmpq_mpoly_ctx.get(names, "deglex")
        self.gens = self.ctx.gens()
        self.zero = self.ctx.constant(0)
        self.one = self.ctx.constant(1)

    def ground(self, value) -> "flint.fmpq_mpoly":
        return self.ctx.constant(_fmpq(value))

    def from_dict(self, d):
        return self.ctx.from_dict(d)


@lru_cache(maxsize=None)
def _ring(names: tuple) -> _Ring:
    return _Ring(names)


def _fmpq(value):
    if isinstance(value, flint.fmpq):
        return value
    value = Fraction(value)
    return flint.fmpq(value.numerator, value.denominator)


@dataclass(frozen=True)
class Chart:
    """Ordered coordinate names of a local chart."""

    names: tuple

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        if not names:
            raise ValueError("a chart needs at least one coordinate")
        for name in names:
            if not isinstance(name, str) or not _IDENT.match(name):
                raise ValueError(f"invalid coordinate name {name!r}")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate coordinate names in {names}")
        object.__setattr__(self, "names", names)

    @property
    def dim(self) -> int:
        return len(self.names)

    @property
    def ring(self) -> _Ring:
        return _ring(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ChartMismatchError(f"{name!r} is not a coordinate of {self.names}") from None

    def var(self, name: str) -> "RationalFn":
        i = self.index(name)
        return RationalFn._raw(self, self.ring.gens[i], self.ring.one)

    def coords(self) -> tuple:
        return tuple(self.var(n) for n in self.names)

    def const(self, value: Scalar) -> "RationalFn":
        return RationalFn._raw(self, self.ring.ground(value), self.ring.one)

    def zero(self) -> "RationalFn":
        return RationalFn._raw(self, self.ring.zero, self.ring.one)

    def one(self) -> "RationalFn":
        return RationalFn._raw(self, self.ring.one, self.ring.one)

    def parse(self, text: str) -> "RationalFn":
        return parse_expr(text, self)

    def __repr__(self):
        return f"Chart({', '.join(self.names)})"


def to_fraction(q) -> Fraction:
    return Fraction(int(q.p), int(q.q))


class RationalFn:
    """Immutable reduced quotient ``num/den`` of polynomials over Q."""

    __slots__ = ("chart", "num", "den", "_hash")

    def __init__(self, chart: Chart, num, den=None):
        ring = chart.ring
        num = _coerce_poly(ring, num)
        den = ring.one if den is None else _coerce_poly(ring, den)
        if den.is_zero():
            raise DivisionByZero("denominator is the zero polynomial")
        self._set(chart, *_normalize(num, den))

    def _set(self, chart, num, den):
        object.__setattr__(self, "chart", chart)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        object.__setattr__(self, "_hash", None)

    @classmethod
    def _raw(cls, chart, num, den):
        obj = object.__new__(cls)
        obj._set(chart, num, den)
        return obj

    def __setattr__(self, key, value):
        raise AttributeError("RationalFn is immutable")

    # -- coercion ---------------------------------------------------------
    def _coerce(self, other) -> "RationalFn":
        if isinstance(other, RationalFn):
            if other.chart is not self.chart and other.chart != self.chart:
                raise ChartMismatchError(f"{self.chart} vs {other.chart}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.chart.const(other)
        return NotImplemented

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.den.is_one() and other.den.is_one():
            return RationalFn._raw(self.chart, self.num + other.num, self.den)
        if self.den == other.den:
            return _make(self.chart, self.num + other.num, self.den)
        return _make(self.chart, self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFn._raw(self.chart, -self.num, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.den.is_one() and other.den.is_one():
            return RationalFn._raw(self.chart, self.num * other.num, self.den)
        if self.num.is_zero() or other.num.is_zero():
            return self.chart.zero()
        return _make(self.chart, self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.num.is_zero():
            raise DivisionByZero("division by the zero polynomial")
        return _make(self.chart, self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("only integer powers are supported")
        if n < 0:
            if self.num.is_zero():
                raise DivisionByZero("negative power of zero")
            return _make(self.chart, self.den**-n, self.num**-n)
        return RationalFn._raw(self.chart, self.num**n, self.den**n)

    # -- comparisons ------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.chart.const(other)
        if not isinstance(other, RationalFn):
            return NotImplemented
        return self.chart == other.chart and self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            h = hash((self.chart.names, tuple(self.num.to_dict().items()), tuple(self.den.to_dict().items())))
            object.__setattr__(self, "_hash", h)
        return self._hash

    def __bool__(self):
        return not self.num.is_zero()

    # -- predicates and queries -------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_one()

    def is_constant(self) -> bool:
        return self.den.is_one() and self.num.is_constant()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return Fraction(0) if self.num.is_zero() else to_fraction(self.num.leading_coefficient())

    def total_degree(self) -> int:
        """Total degree of the numerator (``-1`` for the zero function)."""
        if self.num.is_zero():
            return -1
        return int(self.num.total_degree())

    def depends_on(self, name: str) -> bool:
        i = self.chart.index(name)
        return any(m[i] for m in self.num.monoms()) or any(m[i] for m in self.den.monoms())

    def numerator(self) -> "RationalFn":
        return RationalFn._raw(self.chart, self.num, self.chart.ring.one)

    def denominator(self) -> "RationalFn":
        return RationalFn._raw(self.chart, self.den, self.chart.ring.one)

    # -- calculus ---------------------------------------------------------
    def diff(self, name: str) -> "RationalFn":
        i = self.chart.index(name)
        return self.diff_index(i)

    def diff_index(self, i: int) -> "RationalFn":
        dn = self.num.derivative(i)
        if self.den.is_one():
            return RationalFn._raw(self.chart, dn, self.den)
        dd = self.den.derivative(i)
        if dd.is_zero():
            return _make(self.chart, dn, self.den)
        return _make(self.chart, dn * self.den - self.num * dd, self.den**2)

    def __call__(self, *point):
        return self.eval_at(point)

    def eval_at(self, point: Sequence[Scalar]) -> Fraction:
        if len(point) != self.chart.dim:
            raise ValueError(f"point has {len(point)} coordinates, chart has {self.chart.dim}")
        vals = [_fmpq(v) for v in point]
        d = self.den(*vals)
        if d == 0:
            raise PoleError(f"{self} has a pole at {tuple(point)}")
        return to_fraction(self.num(*vals)) / to_fraction(d)

    def subs_chart(self, chart: Chart) -> "RationalFn":
        """Re-home onto a chart whose names include every name used here."""
        if chart == self.chart:
            return self
        idx = [chart.index(n) if self.depends_on(n) else None for n in self.chart.names]

        def move(p):
            out = {}
            for mono, c in p.to_dict().items():
                m = [0] * chart.dim
                for j, e in enumerate(mono):
                    if e:
                        m[idx[j]] = e
                out[tuple(m)] = c
            return chart.ring.from_dict(out)

        return RationalFn._raw(chart, move(self.num), move(self.den))

    # -- printing ---------------------------------------------------------
    def __str__(self):
        num = _poly_str(self.num, self.chart.names)
        if self.is_polynomial():
            return num
        return f"({num})/({_poly_str(self.den, self.chart.names)})"

    def __repr__(self):
        return f"RationalFn({str(self)!r})"


def _coerce_poly(ring, p):
    if isinstance(p, flint.fmpq_mpoly):
        return p
    return ring.ground(p)


def _normalize(num, den):
    ctx = num.context()
    if num.is_zero():
        return num, ctx.constant(1)
    if den.is_constant():
        return num / den.leading_coefficient(), ctx.constant(1)
    g = num.gcd(den)
    if not g.is_constant():
        num = num / g
        den = den / g
    lc = den.leading_coefficient()
    if lc != 1:
        num = num / lc
        den = den / lc
    return num, den


def _make(chart, num, den) -> RationalFn:
    return RationalFn._raw(chart, *_normalize(num, den))


def _scalar_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _poly_str(p, names) -> str:
    if p.is_zero():
        return "0"
    terms = sorted(p.to_dict().items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)
    out = []
    for k, (mono, c) in enumerate(terms):
        c = to_fraction(c)
        sign = "-" if c < 0 else "+"
        c = abs(c)
        factors = [n if e == 1 else f"{n}^{e}" for n, e in zip(names, mono) if e]
        if not factors:
            body = _scalar_str(c)
        elif c == 1:
            body = "*".join(factors)
        else:
            body = "*".join([_scalar_str(c)] + factors)
        if k == 0:
            out.append(("-" if sign == "-" else "") + body)
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"(\d+)|([a-zA-Z][a-zA-Z0-9_]*)|(\S)")


def _tokenize(text: str):
    tokens = []
    pos = 0
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN.match(text, pos)
        if m.group(1) is not None:
            tokens.append(("int", int(m.group(1)), pos))
        elif m.group(2) is not None:
            tokens.append(("ident", m.group(2), pos))
        else:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", pos, text)
            tokens.append((ch, ch, pos))
        pos = m.end()
    tokens.append(("end", None, n))
    return tokens


class _Parser:
    # expr  := term (('+'|'-') term)*
    # term  := unary (('*'|'/') unary)*
    # unary := '-' unary | power
    # power := atom ('^' '-'? integer)?
    # atom  := integer | ident | '(' expr ')'

    def __init__(self, text, chart):
        self.text = text
        self.chart = chart
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind):
        tok = self.take()
        if tok[0] != kind:
            raise ParseError(f"expected {kind!r}", tok[2], self.text)
        return tok

    def parse(self):
        if self.peek()[0] == "end":
            raise ParseError("empty expression", 0, self.text)
        value = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected {tok[1]!r}", tok[2], self.text)
        return value

    def expr(self):
        value = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.unary()
        while self.peek()[0] in ("*", "/"):
            op, _, pos = self.take()
            rhs = self.unary()
            if op == "*":
                value = value * rhs
            else:
                if rhs.is_zero():
                    raise DivisionByZero(f"division by the zero polynomial at position {pos}", pos)
                value = value / rhs
        return value

    def unary(self):
        if self.peek()[0] == "-":
            self.take()
            return -self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] != "^":
            return base
        _, _, pos = self.take()
        negative = False
        if self.peek()[0] == "-":
            self.take()
            negative = True
        tok = self.take()
        if tok[0] != "int":
            raise ExponentError("exponent must be an integer literal", tok[2], self.text)
        n = -tok[1] if negative else tok[1]
        if n < 0 and base.is_zero():
            raise DivisionByZero(f"negative power of zero at position {pos}", pos)
        return base**n

    def atom(self):
        kind, value, pos = self.take()
        if kind == "int":
            return self.chart.const(value)
        if kind == "ident":
            if value not in self.chart.names:
                raise UnknownVariableError(f"unknown variable {value!r}", pos, self.text)
            return self.chart.var(value)
        if kind == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        if kind == "end":
            raise ParseError("unexpected end of expression", pos, self.text)
        raise ParseError(f"unexpected {value!r}", pos, self.text)


def parse_expr(text: str, chart: Chart) -> RationalFn:
    """Parse ``text`` into a canonical :class:`RationalFn` on ``chart``.

    >>> c = Chart(["u1", "u2", "u3"])
    >>> str(parse_expr("-1/2*u2", c))
    '-1/2*u2'
    """
    if not isinstance(text, str):
        raise TypeError("expression text must be a string")
    return _Parser(text, chart).parse()


def partial(f: RationalFn, var: str) -> RationalFn:
    return f.diff(var)


def is_zero(f: RationalFn) -> bool:
    return f.is_zero()


def eval_at(f: RationalFn, point: Sequence[Scalar]) -> Fraction:
    return f.eval_at(point)
