"""Tensor fields on a coordinate chart.

Conventions: vector fields are columns and a (1,1)-tensor acts on them by
matrix-column product; 1-forms are rows and ``theta R`` is the row-matrix
product.  ``Tensor11.entries[i][j]`` is the i-th component of ``R e_j``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from . import linalg
from .exprcore import Chart, ChartMismatchError, RationalFn, parse_expr

__all__ = [
    "VectorField",
    "OneForm",
    "TwoForm",
    "Tensor11",
    "Tensor12",
    "Bivector",
    "NotClosedError",
    "NonPolynomialError",
    "NonRationalPotentialError",
    "lie_bracket",
    "apply11",
    "coapply11",
    "d0",
    "d1",
    "is_closed",
    "potential_of_closed",
    "rational_potential",
    "pair",
    "lie_derivative",
    "bivector_sharp",
    "as_fn",
]

Entry = Union[RationalFn, str, int, Fraction]


class NotClosedError(ValueError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NonPolynomialError(ValueError):
    pass


class NonRationalPotentialError(ValueError):
    pass


def as_fn(chart: Chart, value: Entry) -> RationalFn:
    if isinstance(value, RationalFn):
        if value.chart != chart:
            raise ChartMismatchError(f"{value.chart} vs {chart}")
        return value
    if isinstance(value, str):
        return parse_expr(value, chart)
    return chart.const(value)


def _same_chart(*objs):
    chart = objs[0].chart
    for o in objs[1:]:
        if o.chart != chart:
            raise ChartMismatchError(f"{chart} vs {o.chart}")
    return chart


def _vector(chart, comps, what):
    comps = tuple(as_fn(chart, c) for c in comps)
    if len(comps) != chart.dim:
        raise ValueError(f"{what} needs {chart.dim} components, got {len(comps)}")
    return comps


def _matrix(chart, rows, what):
    rows = tuple(tuple(as_fn(chart, x) for x in row) for row in rows)
    n = chart.dim
    if len(rows) != n or any(len(r) != n for r in rows):
        shape = f"{len(rows)}x{max((len(r) for r in rows), default=0)}"
        raise ValueError(f"{what} must be {n}x{n}, got {shape}")
    return rows


def _fmt_vector(comps):
    return "(" + ", ".join(str(c) for c in comps) + ")"


@dataclass(frozen=True)
class VectorField:
    chart: Chart
    components: tuple

    def __post_init__(self):
        object.__setattr__(self, "components", _vector(self.chart, self.components, "vector field"))

    @classmethod
    def basis(cls, chart: Chart, i: int) -> "VectorField":
        return cls(chart, tuple(chart.one() if j == i else chart.zero() for j in range(chart.dim)))

    @classmethod
    def zero(cls, chart: Chart) -> "VectorField":
        return cls(chart, (chart.zero(),) * chart.dim)

    def __getitem__(self, i):
        return self.components[i]

    def __add__(self, other):
        _same_chart(self, other)
        return VectorField(self.chart, tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other):
        _same_chart(self, other)
        return VectorField(self.chart, tuple(a - b for a, b in zip(self.components, other.components)))

    def __neg__(self):
        return VectorField(self.chart, tuple(-a for a in self.components))

    def __rmul__(self, f):
        f = as_fn(self.chart, f)
        return VectorField(self.chart, tuple(f * a for a in self.components))

    def is_zero(self) -> bool:
        return all(not c for c in self.components)

    def __call__(self, f: RationalFn) -> RationalFn:
        """Directional derivative ``X(f)``."""
        return _derivative(self.components, f)

    def __str__(self):
        return _fmt_vector(self.components)


@dataclass(frozen=True)
class OneForm:
    chart: Chart
    components: tuple

    def __post_init__(self):
        object.__setattr__(self, "components", _vector(self.chart, self.components, "1-form"))

    @classmethod
    def basis(cls, chart: Chart, i: int) -> "OneForm":
        return cls(chart, tuple(chart.one() if j == i else chart.zero() for j in range(chart.dim)))

    def __getitem__(self, i):
        return self.components[i]

    def __add__(self, other):
        _same_chart(self, other)
        return OneForm(self.chart, tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other):
        _same_chart(self, other)
        return OneForm(self.chart, tuple(a - b for a, b in zip(self.components, other.components)))

    def __neg__(self):
        return OneForm(self.chart, tuple(-a for a in self.components))

    def __rmul__(self, f):
        f = as_fn(self.chart, f)
        return OneForm(self.chart, tuple(f * a for a in self.components))

    def __matmul__(self, R: "Tensor11") -> "OneForm":
        return coapply11(self, R)

    def is_zero(self) -> bool:
        return all(not c for c in self.components)

    def __str__(self):
        terms = [f"({c})*d{n}" for c, n in zip(self.components, self.chart.names) if c]
        return " + ".join(terms) if terms else "0"


@dataclass(frozen=True)
class TwoForm:
    """Skew matrix of coefficients; ``components[i][j]`` multiplies dx^i ^ dx^j for i < j."""

    chart: Chart
    components: tuple

    def __post_init__(self):
        m = _matrix(self.chart, self.components, "2-form")
        for i in range(self.chart.dim):
            for j in range(i, self.chart.dim):
                if m[i][j] != -m[j][i]:
                    raise ValueError(f"2-form components not skew at ({i}, {j})")
        object.__setattr__(self, "components", m)

    def is_zero(self) -> bool:
        return linalg.is_zero(self.components)

    def nonzero_components(self):
        n = self.chart.dim
        return [((i, j), self.components[i][j]) for i in range(n) for j in range(i + 1, n) if self.components[i][j]]


@dataclass(frozen=True)
class Tensor11:
    chart: Chart
    entries: tuple

    def __post_init__(self):
        object.__setattr__(self, "entries", _matrix(self.chart, self.entries, "(1,1)-tensor"))

    @classmethod
    def identity(cls, chart: Chart) -> "Tensor11":
        return cls(chart, linalg.identity(chart))

    @classmethod
    def zero(cls, chart: Chart) -> "Tensor11":
        return cls(chart, linalg.zeros(chart, chart.dim))

    @classmethod
    def diag(cls, chart: Chart, values: Sequence[Entry]) -> "Tensor11":
        values = _vector(chart, values, "diagonal")
        z = chart.zero()
        return cls(chart, tuple(tuple(values[i] if i == j else z for j in range(chart.dim)) for i in range(chart.dim)))

    @property
    def dim(self) -> int:
        return self.chart.dim

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def column(self, j: int) -> tuple:
        return tuple(row[j] for row in self.entries)

    def __add__(self, other):
        _same_chart(self, other)
        return Tensor11(self.chart, linalg.add(self.entries, other.entries))

    def __sub__(self, other):
        _same_chart(self, other)
        return Tensor11(self.chart, linalg.sub(self.entries, other.entries))

    def __neg__(self):
        return Tensor11(self.chart, tuple(tuple(-x for x in row) for row in self.entries))

    def __rmul__(self, f):
        return Tensor11(self.chart, linalg.scale(as_fn(self.chart, f), self.entries))

    def __matmul__(self, other):
        if isinstance(other, Tensor11):
            _same_chart(self, other)
            return Tensor11(self.chart, linalg.matmul(self.entries, other.entries))
        if isinstance(other, VectorField):
            return apply11(self, other)
        return NotImplemented

    def __pow__(self, k: int) -> "Tensor11":
        if k < 0:
            return Tensor11(self.chart, linalg.power(linalg.inverse(self.entries), -k, self.chart))
        return Tensor11(self.chart, linalg.power(self.entries, k, self.chart))

    def commutes_with(self, other: "Tensor11") -> bool:
        return self @ other == other @ self

    def is_zero(self) -> bool:
        return linalg.is_zero(self.entries)

    def is_identity(self) -> bool:
        return self.entries == linalg.identity(self.chart)

    def det(self) -> RationalFn:
        return linalg.det(self.entries)

    def __str__(self):
        return "[" + ", ".join("[" + ", ".join(str(x) for x in row) + "]" for row in self.entries) + "]"


@dataclass(frozen=True)
class Tensor12:
    """Skew (1,2)-tensor; ``components[i][j]`` is the vector ``T(e_i, e_j)``."""

    chart: Chart
    components: tuple

    def __post_init__(self):
        n = self.chart.dim
        if len(self.components) != n or any(len(r) != n for r in self.components):
            raise ValueError("(1,2)-tensor has the wrong shape")
        comps = tuple(tuple(_vector(self.chart, self.components[i][j], "torsion value") for j in range(n)) for i in range(n))
        for i in range(n):
            for j in range(i, n):
                if any(a != -b for a, b in zip(comps[i][j], comps[j][i])):
                    raise ValueError(f"(1,2)-tensor not skew in ({i}, {j})")
        object.__setattr__(self, "components", comps)

    @classmethod
    def from_function(cls, chart: Chart, fn) -> "Tensor12":
        """Build from ``fn(i, j) -> vector`` evaluated for i < j only."""
        n = chart.dim
        z = (chart.zero(),) * n
        comps = [[z] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                v = tuple(fn(i, j))
                comps[i][j] = v
                comps[j][i] = tuple(-x for x in v)
        return cls(chart, tuple(tuple(r) for r in comps))

    @classmethod
    def zero(cls, chart: Chart) -> "Tensor12":
        return cls.from_function(chart, lambda i, j: (chart.zero(),) * chart.dim)

    @property
    def dim(self) -> int:
        return self.chart.dim

    def __getitem__(self, ij) -> tuple:
        i, j = ij
        return self.components[i][j]

    def component(self, k: int, i: int, j: int) -> RationalFn:
        return self.components[i][j][k]

    def __call__(self, X: VectorField, Y: VectorField) -> VectorField:
        _same_chart(self, X, Y)
        return VectorField(self.chart, _apply12(self.components, X.components, Y.components))

    def _map(self, op, other=None):
        n = self.dim
        if other is None:
            return Tensor12(self.chart, tuple(tuple(tuple(op(a) for a in self.components[i][j]) for j in range(n)) for i in range(n)))
        _same_chart(self, other)
        return Tensor12(
            self.chart,
            tuple(
                tuple(tuple(op(a, b) for a, b in zip(self.components[i][j], other.components[i][j])) for j in range(n))
                for i in range(n)
            ),
        )

    def __add__(self, other):
        return self._map(lambda a, b: a + b, other)

    def __sub__(self, other):
        return self._map(lambda a, b: a - b, other)

    def __neg__(self):
        return self._map(lambda a: -a)

    def __rmul__(self, f):
        f = as_fn(self.chart, f)
        return self._map(lambda a: f * a)

    def is_zero(self) -> bool:
        return all(not x for row in self.components for v in row for x in v)

    def nonzero_components(self):
        """``[((i, j), vector)]`` for i < j with a nonzero value."""
        n = self.dim
        return [((i, j), self.components[i][j]) for i in range(n) for j in range(i + 1, n) if any(self.components[i][j])]

    def __str__(self):
        nz = self.nonzero_components()
        if not nz:
            return "0"
        return "; ".join(f"(e{i + 1}, e{j + 1}) -> {_fmt_vector(v)}" for (i, j), v in nz)


@dataclass(frozen=True)
class Bivector:
    """Skew matrix ``P^{ij}``; maps a 1-form to the vector field ``P^{ij} theta_j``."""

    chart: Chart
    components: tuple

    def __post_init__(self):
        m = _matrix(self.chart, self.components, "bivector")
        for i in range(self.chart.dim):
            for j in range(i, self.chart.dim):
                if m[i][j] != -m[j][i]:
                    raise ValueError(f"bivector components not skew at ({i}, {j})")
        object.__setattr__(self, "components", m)

    @classmethod
    def canonical(cls, chart: Chart) -> "Bivector":
        """``sum_i d/dq^i ^ d/dp_i`` on a (q..., p...) chart."""
        if chart.dim % 2:
            raise ValueError("canonical bivector needs an even-dimensional chart")
        n = chart.dim // 2
        one, z = chart.one(), chart.zero()
        rows = [[z] * chart.dim for _ in range(chart.dim)]
        for i in range(n):
            rows[i][n + i] = one
            rows[n + i][i] = -one
        return cls(chart, tuple(tuple(r) for r in rows))

    def __getitem__(self, ij):
        i, j = ij
        return self.components[i][j]

    def __add__(self, other):
        _same_chart(self, other)
        return Bivector(self.chart, linalg.add(self.components, other.components))

    def __rmul__(self, f):
        return Bivector(self.chart, linalg.scale(as_fn(self.chart, f), self.components))

    def __call__(self, theta: OneForm) -> VectorField:
        return bivector_sharp(self, theta)

    def is_zero(self) -> bool:
        return linalg.is_zero(self.components)


# ---------------------------------------------------------------------------
# raw component helpers (tuples of RationalFn)
# ---------------------------------------------------------------------------

def _derivative(X, f):
    acc = None
    for i, x in enumerate(X):
        if x:
            df = f.diff_index(i)
            if df:
                acc = x * df if acc is None else acc + x * df
    return acc if acc is not None else f.chart.zero()


def _bracket(X, Y):
    """Components of the Lie bracket [X, Y]."""
    return tuple(_derivative(X, y) - _derivative(Y, x) for x, y in zip(X, Y))


def _apply12(comps, X, Y):
    n = len(X)
    chart = X[0].chart
    out = [chart.zero()] * n
    for i in range(n):
        if not X[i]:
            continue
        for j in range(n):
            if i == j or not Y[j]:
                continue
            c = X[i] * Y[j]
            v = comps[i][j]
            for k in range(n):
                if v[k]:
                    out[k] = out[k] + c * v[k]
    return tuple(out)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def lie_bracket(X: VectorField, Y: VectorField) -> VectorField:
    chart = _same_chart(X, Y)
    return VectorField(chart, _bracket(X.components, Y.components))


def apply11(R: Tensor11, X: VectorField) -> VectorField:
    chart = _same_chart(R, X)
    return VectorField(chart, linalg.matvec(R.entries, X.components))


def coapply11(theta: OneForm, R: Tensor11) -> OneForm:
    """``theta R``: the row-vector times matrix action (transpose of R on theta)."""
    chart = _same_chart(theta, R)
    return OneForm(chart, linalg.vecmat(theta.components, R.entries))


def d0(f: RationalFn) -> OneForm:
    """Gradient 1-form ``df``."""
    return OneForm(f.chart, tuple(f.diff_index(i) for i in range(f.chart.dim)))


def d1(theta: OneForm) -> TwoForm:
    n = theta.chart.dim
    t = theta.components
    z = theta.chart.zero()
    rows = [[z] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            v = t[j].diff_index(i) - t[i].diff_index(j)
            rows[i][j] = v
            rows[j][i] = -v
    return TwoForm(theta.chart, tuple(tuple(r) for r in rows))


def is_closed(theta: OneForm) -> bool:
    return d1(theta).is_zero()


def _require_closed(theta: OneForm):
    nz = d1(theta).nonzero_components()
    if nz:
        (i, j), value = nz[0]
        names = theta.chart.names
        raise NotClosedError(
            f"1-form is not closed: d(theta)[{names[i]},{names[j]}] = {value}",
            witness=((i, j), value),
        )


def potential_of_closed(theta: OneForm) -> RationalFn:
    """Polynomial potential ``f`` with ``df = theta`` and ``f(0) = 0``.

    Uses radial integration ``f(x) = int_0^1 sum_i x^i theta_i(t x) dt``,
    which on a monomial of total degree ``m`` just divides by ``m + 1``.
    """
    chart = theta.chart
    for c in theta.components:
        if not c.is_polynomial():
            raise NonPolynomialError(f"component {c} of the 1-form is not polynomial")
    _require_closed(theta)
    ring = chart.ring
    terms = {}
    for i, c in enumerate(theta.components):
        for mono, coeff in c.num.to_dict().items():
            m = list(mono)
            m[i] += 1
            m = tuple(m)
            terms[m] = terms.get(m, 0) + coeff / (sum(mono) + 1)
    return RationalFn(chart, ring.from_dict({m: c for m, c in terms.items() if c}))


def _poly_expr(p, symbols):
    import sympy

    terms = []
    for mono, c in p.to_dict().items():
        t = sympy.Rational(int(c.p), int(c.q))
        for x, e in zip(symbols, mono):
            t *= x**e
        terms.append(t)
    return sympy.Add(*terms)


def _expr_poly(chart: Chart, expr, symbols):
    import sympy

    poly = sympy.Poly(expr, *symbols, domain=sympy.QQ)
    return chart.ring.from_dict({m: _fmpq(c) for m, c in poly.as_dict().items()})


def _fmpq(c):
    from .exprcore import _fmpq as conv

    return conv(Fraction(int(c.numerator), int(c.denominator)))


def _from_expr(chart: Chart, expr, symbols) -> RationalFn:
    import sympy

    num, den = sympy.fraction(sympy.cancel(sympy.together(expr)))
    try:
        return RationalFn(chart, _expr_poly(chart, num, symbols), _expr_poly(chart, den, symbols))
    except sympy.polys.polyerrors.PolynomialError as exc:
        raise NonRationalPotentialError(f"antiderivative {expr} is not rational") from exc


def rational_potential(theta: OneForm) -> RationalFn:
    """Rational potential of a closed rational 1-form.

    Integrates one coordinate at a time with sympy's exact rational
    integration and raises when a logarithmic part appears.  The result is
    shifted to vanish at the origin when it is regular there; otherwise the
    constant left by the coordinate-wise integration is kept.
    """
    import sympy
    from sympy.integrals.rationaltools import ratint

    chart = theta.chart
    if all(c.is_polynomial() for c in theta.components):
        return potential_of_closed(theta)
    _require_closed(theta)
    symbols = sympy.symbols(chart.names)
    total = chart.zero()
    residual = theta
    for i, x in enumerate(symbols):
        c = residual.components[i]
        if not c:
            continue
        # the other coordinates are parameters; a fraction-field domain keeps ratint fast
        others = [s for s in symbols if s != x]
        dom = sympy.QQ.frac_field(*others) if others else sympy.QQ
        num = sympy.Poly(_poly_expr(c.num, symbols), x, domain=dom)
        den = sympy.Poly(_poly_expr(c.den, symbols), x, domain=dom)
        anti = ratint((num, den), x)
        if anti.has(sympy.log, sympy.atan, sympy.RootSum):
            raise NonRationalPotentialError(f"potential of {theta} is not a rational function")
        g = _from_expr(chart, anti, symbols)
        total = total + g
        residual = residual - d0(g)
    if not residual.is_zero():
        raise NonRationalPotentialError("coordinate-wise integration left a residual")
    try:
        origin = total.eval_at([0] * chart.dim)
    except ZeroDivisionError:
        return total
    return total - origin


def pair(theta: OneForm, X: VectorField) -> RationalFn:
    chart = _same_chart(theta, X)
    acc = chart.zero()
    for a, b in zip(theta.components, X.components):
        if a and b:
            acc = acc + a * b
    return acc


def lie_derivative(X: VectorField, T):
    """Lie derivative of a function, vector field, 1-form or (1,1)-tensor along X."""
    if isinstance(T, RationalFn):
        return X(T)
    _same_chart(X, T)
    chart = X.chart
    if isinstance(T, VectorField):
        return lie_bracket(X, T)
    if isinstance(T, OneForm):
        # Cartan: L_X theta = d<theta, X> + i_X d theta
        grad = d0(pair(T, X)).components
        dt = d1(T).components
        n = chart.dim
        comps = []
        for j in range(n):
            acc = grad[j]
            for i in range(n):
                if X.components[i] and dt[i][j]:
                    acc = acc + X.components[i] * dt[i][j]
            comps.append(acc)
        return OneForm(chart, tuple(comps))
    if isinstance(T, Tensor11):
        # (L_X R)(e_j) = [X, R e_j] - R [X, e_j]
        n = chart.dim
        cols = []
        for j in range(n):
            ej = VectorField.basis(chart, j).components
            a = _bracket(X.components, T.column(j))
            b = linalg.matvec(T.entries, _bracket(X.components, ej))
            cols.append(tuple(p - q for p, q in zip(a, b)))
        return Tensor11(chart, linalg.transpose(cols))
    raise TypeError(f"no Lie derivative for {type(T).__name__}")


def bivector_sharp(P: Bivector, theta: OneForm) -> VectorField:
    chart = _same_chart(P, theta)
    return VectorField(chart, linalg.matvec(P.components, theta.components))
