"""Dense matrices of RationalFn, stored as tuples of row tuples."""
from __future__ import annotations

from .exprcore import Chart, RationalFn


class SingularMatrixError(ArithmeticError):
    pass


def identity(chart: Chart, n: int | None = None):
    n = chart.dim if n is None else n
    one, zero = chart.one(), chart.zero()
    return tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n))


def zeros(chart: Chart, rows: int, cols: int | None = None):
    cols = rows if cols is None else cols
    z = chart.zero()
    return tuple(tuple(z for _ in range(cols)) for _ in range(rows))


def matmul(a, b):
    n, m, p = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        row = a[i]
        out_row = []
        for j in range(p):
            acc = None
            for k in range(m):
                x = row[k]
                if not x:
                    continue
                y = b[k][j]
                if not y:
                    continue
                acc = x * y if acc is None else acc + x * y
            out_row.append(acc if acc is not None else row[0].chart.zero())
        out.append(tuple(out_row))
    return tuple(out)


def matvec(a, v):
    out = []
    for row in a:
        acc = None
        for x, y in zip(row, v):
            if x and y:
                acc = x * y if acc is None else acc + x * y
        out.append(acc if acc is not None else row[0].chart.zero())
    return tuple(out)


def vecmat(v, a):
    n = len(a[0])
    out = []
    for j in range(n):
        acc = None
        for i, x in enumerate(v):
            y = a[i][j]
            if x and y:
                acc = x * y if acc is None else acc + x * y
        out.append(acc if acc is not None else v[0].chart.zero())
    return tuple(out)


def add(a, b):
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def sub(a, b):
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def scale(c, a):
    return tuple(tuple(c * x for x in row) for row in a)


def transpose(a):
    return tuple(zip(*a))


def is_zero(a) -> bool:
    return all(not x for row in a for x in row)


def power(a, k: int, chart: Chart):
    result = identity(chart, len(a))
    base = a
    while k:
        if k & 1:
            result = matmul(result, base)
        k >>= 1
        if k:
            base = matmul(base, base)
    return result


def det(a) -> RationalFn:
    """Determinant by Bareiss fraction-free elimination."""
    n = len(a)
    m = [list(row) for row in a]
    chart = m[0][0].chart
    sign = 1
    prev = chart.one()
    for k in range(n - 1):
        if not m[k][k]:
            for r in range(k + 1, n):
                if m[r][k]:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return chart.zero()
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev
        prev = m[k][k]
    d = m[n - 1][n - 1]
    return d if sign > 0 else -d


def solve(a, b):
    """Solve ``a @ x = b`` for a square nonsingular ``a`` and matrix ``b``.

    Forward elimination is fraction-free (Bareiss); only back substitution
    divides.
    """
    n = len(a)
    width = len(b[0])
    m = [list(a[i]) + list(b[i]) for i in range(n)]
    chart = a[0][0].chart
    prev = chart.one()
    for k in range(n):
        if not m[k][k]:
            for r in range(k + 1, n):
                if m[r][k]:
                    m[k], m[r] = m[r], m[k]
                    break
            else:
                raise SingularMatrixError("matrix is singular over the rational-function field")
        for i in range(k + 1, n):
            for j in range(k + 1, n + width):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev
            m[i][k] = chart.zero()
        prev = m[k][k]
    x = [[None] * width for _ in range(n)]
    for c in range(width):
        for i in reversed(range(n)):
            acc = m[i][n + c]
            for j in range(i + 1, n):
                if m[i][j]:
                    acc = acc - m[i][j] * x[j][c]
            x[i][c] = acc / m[i][i]
    return tuple(tuple(row) for row in x)


def inverse(a):
    chart = a[0][0].chart
    return solve(a, identity(chart, len(a)))
