"""Nijenhuis and Haantjes torsions and their higher iterates.

Every public torsion is computed along more than one independent route and
the routes are compared exactly; a mismatch raises
:class:`RouteDisagreementError`.  The torsion here is the un-doubled one:
the classical index formulas produce twice these values and are halved.

A torsion context is either a :class:`~haantjes.exprcore.Chart`, where the
bracket is the Lie bracket of vector fields, or a :class:`BracketSpace`
given by constant structure constants.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Union

from . import linalg
from .exprcore import Chart, ChartMismatchError
from .geom import Tensor11, Tensor12, VectorField, _apply12, _bracket

__all__ = [
    "BracketSpace",
    "TorsionContext",
    "RouteDisagreementError",
    "nijenhuis",
    "nijenhuis_eval",
    "concomitant",
    "torsion_of",
    "haantjes",
    "higher_nijenhuis",
    "higher_haantjes",
    "jacobiator_bracket",
]


class RouteDisagreementError(AssertionError):
    """Two computation routes for the same torsion gave different results."""


@dataclass(frozen=True)
class BracketSpace:
    """Vector space with a skew bilinear bracket ``mu(e_i, e_j) = sum_k c[i][j][k] e_k``."""

    dim: int
    constants: tuple

    def __init__(self, dim: int, constants=None):
        if dim < 1:
            raise ValueError("dimension must be positive")
        c = [[[Fraction(0)] * dim for _ in range(dim)] for _ in range(dim)]
        seen = {}
        items = constants.items() if isinstance(constants, dict) else (constants or [])
        for key, value in items:
            i, j, k = key
            for idx in (i, j, k):
                if not 0 <= idx < dim:
                    raise ValueError(f"index {idx} out of range for dimension {dim}")
            value = Fraction(value)
            if i == j and value:
                raise ValueError(f"mu(e_{i}, e_{i}) must vanish")
            for a, b, v in ((i, j, value), (j, i, -value)):
                prev = seen.get((a, b, k))
                if prev is not None and prev != v:
                    raise ValueError(f"structure constants not skew at ({i}, {j}, {k})")
                seen[(a, b, k)] = v
                c[a][b][k] = v
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "constants", tuple(tuple(tuple(r) for r in row) for row in c))

    @classmethod
    def abelian(cls, dim: int) -> "BracketSpace":
        return cls(dim)

    def mu(self, X, Y):
        """Bracket of two component tuples (entries may be RationalFn)."""
        n = self.dim
        chart = X[0].chart
        out = [chart.zero()] * n
        for i in range(n):
            if not X[i]:
                continue
            for j in range(n):
                if i == j or not Y[j]:
                    continue
                cij = self.constants[i][j]
                if not any(cij):
                    continue
                f = X[i] * Y[j]
                for k in range(n):
                    if cij[k]:
                        out[k] = out[k] + f * cij[k]
        return tuple(out)

    def as_tensor(self, chart: Chart) -> Tensor12:
        if chart.dim != self.dim:
            raise ChartMismatchError(f"chart dimension {chart.dim} != bracket space dimension {self.dim}")
        return Tensor12.from_function(chart, lambda i, j: tuple(chart.const(c) for c in self.constants[i][j]))

    def is_lie_algebra(self) -> bool:
        J = jacobiator_bracket(self)
        return all(not x for a in J for b in a for c in b for x in c)


TorsionContext = Union[Chart, BracketSpace]


def _mu_for(R: Tensor11, ctx: TorsionContext):
    if isinstance(ctx, BracketSpace):
        if R.dim != ctx.dim:
            raise ChartMismatchError(f"tensor dimension {R.dim} != bracket space dimension {ctx.dim}")
        return ctx.mu
    if isinstance(ctx, Chart):
        if R.chart != ctx:
            raise ChartMismatchError(f"{R.chart} vs {ctx}")
        return _bracket
    raise TypeError(f"not a torsion context: {ctx!r}")


def _check_same(R: Tensor11, *others):
    for o in others:
        if o.chart != R.chart:
            raise ChartMismatchError(f"{R.chart} vs {o.chart}")


def _vadd(*vs):
    out = list(vs[0])
    for v in vs[1:]:
        for k, x in enumerate(v):
            if x:
                out[k] = out[k] + x
    return tuple(out)


def _vneg(v):
    return tuple(-x for x in v)


def _vscale(c, v):
    return tuple(c * x for x in v)


def _basis(chart, i):
    return tuple(chart.one() if j == i else chart.zero() for j in range(chart.dim))


def _nij_fields(M, mu, X, Y):
    """T_R(X, Y) = [RX, RY] - R[RX, Y] - R[X, RY] + R^2 [X, Y] on arbitrary fields."""
    RX, RY = linalg.matvec(M, X), linalg.matvec(M, Y)
    a = mu(RX, RY)
    b = mu(RX, Y)
    c = mu(X, RY)
    inner = _vadd(_vneg(b), _vneg(c), linalg.matvec(M, mu(X, Y)))
    return _vadd(a, linalg.matvec(M, inner))


def _agree(name, first, second, labels):
    if first != second:
        diff = first - second
        raise RouteDisagreementError(f"{name}: routes {labels[0]} and {labels[1]} disagree ({diff})")


# ---------------------------------------------------------------------------
# Nijenhuis torsion
# ---------------------------------------------------------------------------

def nijenhuis_eval(R: Tensor11, X: VectorField, Y: VectorField, ctx: TorsionContext | None = None) -> VectorField:
    """Evaluate the bracket-defined torsion expression on two arbitrary fields."""
    ctx = R.chart if ctx is None else ctx
    mu = _mu_for(R, ctx)
    _check_same(R, X, Y)
    return VectorField(R.chart, _nij_fields(R.entries, mu, X.components, Y.components))


def _nijenhuis_free(R: Tensor11, mu) -> Tensor12:
    chart = R.chart
    return Tensor12.from_function(chart, lambda i, j: _nij_fields(R.entries, mu, _basis(chart, i), _basis(chart, j)))


def _nijenhuis_index(R: Tensor11) -> Tensor12:
    """Half of the classical index expression
    H^k_{ml} = 2 h^r_[m d_r h^k_l] - 2 h^k_r d_[m h^r_l]
    with the antisymmetrization taken without the factor 1/2."""
    chart = R.chart
    n = chart.dim
    h = R.entries
    dh = [[[h[a][b].diff_index(r) for r in range(n)] for b in range(n)] for a in range(n)]

    def comp(m, l):
        out = []
        for k in range(n):
            acc = chart.zero()
            for r in range(n):
                acc = acc + h[r][m] * dh[k][l][r] - h[r][l] * dh[k][m][r]
                acc = acc - h[k][r] * (dh[r][l][m] - dh[r][m][l])
            out.append(acc)
        return tuple(out)

    return Tensor12.from_function(chart, comp)


def nijenhuis(R: Tensor11, ctx: TorsionContext | None = None, *, check_routes: bool = True) -> Tensor12:
    """Nijenhuis torsion of ``R``.

    Over a chart the bracket formula on coordinate fields is checked against
    the classical index formula; over a bracket space against the algebraic
    torsion operator applied to the structure tensor.
    """
    ctx = R.chart if ctx is None else ctx
    mu = _mu_for(R, ctx)
    free = _nijenhuis_free(R, mu)
    if check_routes:
        if isinstance(ctx, Chart):
            other = _nijenhuis_index(R)
        else:
            other = torsion_of(R, ctx.as_tensor(R.chart))
        _agree("nijenhuis", free, other, ("bracket", "components"))
    return free


def concomitant(h: Tensor11, k: Tensor11, ctx: TorsionContext | None = None) -> Tensor12:
    """Symmetric bracket ``[h, k] = (T_{h+k} - T_h - T_k) / 2``; ``[R, R] = T_R``."""
    _check_same(h, k)
    ctx = h.chart if ctx is None else ctx
    half = h.chart.const(Fraction(1, 2))
    return half * (nijenhuis(h + k, ctx) - nijenhuis(h, ctx) - nijenhuis(k, ctx))


def torsion_of(R: Tensor11, nu: Tensor12) -> Tensor12:
    """Algebraic torsion operator
    nu(R., R.) - R nu(R., .) - R nu(., R.) + R^2 nu(., .)."""
    _check_same(R, nu)
    chart = R.chart
    M = R.entries
    comps = nu.components

    def value(i, j):
        Ri, Rj = R.column(i), R.column(j)
        ei, ej = _basis(chart, i), _basis(chart, j)
        a = _apply12(comps, Ri, Rj)
        inner = _vadd(_vneg(_apply12(comps, Ri, ej)), _vneg(_apply12(comps, ei, Rj)), linalg.matvec(M, comps[i][j]))
        return _vadd(a, linalg.matvec(M, inner))

    return Tensor12.from_function(chart, value)


# ---------------------------------------------------------------------------
# Haantjes torsion
# ---------------------------------------------------------------------------

def _haantjes_defining(R: Tensor11, mu) -> Tensor12:
    # T evaluated through brackets on the fields R e_i, e_j, ...
    chart, M = R.chart, R.entries

    def value(i, j):
        X, Y = _basis(chart, i), _basis(chart, j)
        RX, RY = linalg.matvec(M, X), linalg.matvec(M, Y)
        a = _nij_fields(M, mu, RX, RY)
        b = _nij_fields(M, mu, RX, Y)
        c = _nij_fields(M, mu, X, RY)
        d = _nij_fields(M, mu, X, Y)
        inner = _vadd(_vneg(b), _vneg(c), linalg.matvec(M, d))
        return _vadd(a, linalg.matvec(M, inner))

    return Tensor12.from_function(chart, value)


def _haantjes_nine_terms(R: Tensor11, mu) -> Tensor12:
    chart, M = R.chart, R.entries
    M2 = linalg.matmul(M, M)
    M3 = linalg.matmul(M2, M)
    M4 = linalg.matmul(M3, M)
    two = chart.const(2)
    four = chart.const(4)

    def value(i, j):
        X, Y = _basis(chart, i), _basis(chart, j)
        RX, RY = linalg.matvec(M, X), linalg.matvec(M, Y)
        R2X, R2Y = linalg.matvec(M2, X), linalg.matvec(M2, Y)
        terms = [
            mu(R2X, R2Y),
            _vscale(-two, linalg.matvec(M, mu(R2X, RY))),
            _vscale(-two, linalg.matvec(M, mu(RX, R2Y))),
            _vscale(four, linalg.matvec(M2, mu(RX, RY))),
            linalg.matvec(M2, mu(R2X, Y)),
            linalg.matvec(M2, mu(X, R2Y)),
            _vscale(-two, linalg.matvec(M3, mu(RX, Y))),
            _vscale(-two, linalg.matvec(M3, mu(X, RY))),
            linalg.matvec(M4, mu(X, Y)),
        ]
        return _vadd(*terms)

    return Tensor12.from_function(chart, value)


def _haantjes_index(R: Tensor11, H: Tensor12) -> Tensor12:
    """Half of H^k_{ns} h^n_m h^s_l - 2 H^s_{n[l} h^n_{m]} h^k_s + H^n_{ml} h^k_s h^s_n,
    where H is twice the torsion and [..] carries the factor 1/2."""
    chart = R.chart
    n = chart.dim
    h = R.entries
    C = H.components
    h2 = linalg.matmul(h, h)
    half = chart.const(Fraction(1, 2))

    def comp(m, l):
        out = []
        for k in range(n):
            acc = chart.zero()
            for a in range(n):
                for b in range(n):
                    if h[a][m] and h[b][l] and C[a][b][k]:
                        acc = acc + C[a][b][k] * h[a][m] * h[b][l]
            for s in range(n):
                if not h[k][s]:
                    continue
                inner = chart.zero()
                for a in range(n):
                    inner = inner + C[a][l][s] * h[a][m] - C[a][m][s] * h[a][l]
                acc = acc - h[k][s] * inner
            for a in range(n):
                if h2[k][a] and C[m][l][a]:
                    acc = acc + C[m][l][a] * h2[k][a]
            out.append(half * acc)
        return tuple(out)

    return Tensor12.from_function(chart, comp)


def haantjes(R: Tensor11, ctx: TorsionContext | None = None, *, check_routes: bool = True) -> Tensor12:
    """Haantjes torsion of ``R``.

    Routes, all compared exactly when ``check_routes`` is set:

    a. the Nijenhuis expression evaluated on ``RX, RY`` etc. through brackets,
    b. the nine-term bracket expansion,
    c. ``torsion_of(R, nijenhuis(R))``,
    d. half the classical index formula fed with twice the torsion.
    """
    ctx = R.chart if ctx is None else ctx
    mu = _mu_for(R, ctx)
    T = nijenhuis(R, ctx, check_routes=check_routes)
    via_torsion = torsion_of(R, T)
    if not check_routes:
        return via_torsion
    defining = _haantjes_defining(R, mu)
    _agree("haantjes", defining, via_torsion, ("a", "c"))
    nine = _haantjes_nine_terms(R, mu)
    _agree("haantjes", nine, via_torsion, ("b", "c"))
    if isinstance(ctx, Chart):
        H = _nijenhuis_index(R)
    else:
        H = torsion_of(R, ctx.as_tensor(R.chart))
    index = _haantjes_index(R, R.chart.const(2) * H)
    _agree("haantjes", index, via_torsion, ("d", "c"))
    return via_torsion


# ---------------------------------------------------------------------------
# higher torsions
# ---------------------------------------------------------------------------

def higher_nijenhuis(R: Tensor11, ctx: TorsionContext | None = None, k: int = 1) -> Tensor12:
    """k-th Nijenhuis torsion: the bracket torsion, then k-1 algebraic iterations."""
    if k < 1:
        raise ValueError("k must be at least 1")
    T = nijenhuis(R, ctx)
    for _ in range(k - 1):
        T = torsion_of(R, T)
    return T


def _higher_haantjes_closed(R: Tensor11, mu, k: int) -> Tensor12:
    chart, M = R.chart, R.entries
    m = k + 1
    powers = [linalg.identity(chart)]
    for _ in range(2 * m):
        powers.append(linalg.matmul(powers[-1], M))

    def value(i, j):
        cols_i = [tuple(row[i] for row in powers[a]) for a in range(m + 1)]
        cols_j = [tuple(row[j] for row in powers[a]) for a in range(m + 1)]
        by_power = {}
        for p in range(m + 1):
            for q in range(m + 1):
                coeff = (-1) ** (p + q) * comb(m, p) * comb(m, q)
                v = _vscale(chart.const(coeff), mu(cols_i[m - p], cols_j[m - q]))
                s = p + q
                by_power[s] = v if s not in by_power else _vadd(by_power[s], v)
        return _vadd(*(linalg.matvec(powers[s], v) for s, v in sorted(by_power.items())))

    return Tensor12.from_function(chart, value)


def higher_haantjes(R: Tensor11, ctx: TorsionContext | None = None, k: int = 1, *, check_routes: bool = True) -> Tensor12:
    """k-th Haantjes torsion, iterated and compared with the binomial closed form."""
    if k < 1:
        raise ValueError("k must be at least 1")
    ctx = R.chart if ctx is None else ctx
    mu = _mu_for(R, ctx)
    H = haantjes(R, ctx, check_routes=check_routes)
    for _ in range(k - 1):
        H = torsion_of(R, H)
    if check_routes:
        _agree("higher_haantjes", H, _higher_haantjes_closed(R, mu, k), ("iterated", "closed form"))
    return H


def jacobiator_bracket(space: BracketSpace):
    """``J[i][j][k]``: components of mu(mu(e_i,e_j),e_k) + cyclic, as Fractions."""
    n = space.dim
    c = space.constants

    def mu(x, y):
        out = [Fraction(0)] * n
        for a in range(n):
            if not x[a]:
                continue
            for b in range(n):
                if not y[b]:
                    continue
                for m in range(n):
                    if c[a][b][m]:
                        out[m] += x[a] * y[b] * c[a][b][m]
        return out

    e = [[Fraction(int(a == b)) for b in range(n)] for a in range(n)]
    J = []
    for i in range(n):
        Ji = []
        for j in range(n):
            Jij = []
            for k in range(n):
                t1 = mu(mu(e[i], e[j]), e[k])
                t2 = mu(mu(e[j], e[k]), e[i])
                t3 = mu(mu(e[k], e[i]), e[j])
                Jij.append(tuple(a + b + cc for a, b, cc in zip(t1, t2, t3)))
            Ji.append(tuple(Jij))
        J.append(tuple(Ji))
    return tuple(J)
