"""Independent sympy implementations used as second routes in the tests.

Nothing here imports the flint-backed arithmetic: inputs are converted
through their printed form and all algebra is redone with sympy.
"""
import sympy


def to_sympy(f, symbols):
    return sympy.parse_expr(str(f).replace("^", "**"), local_dict={str(s): s for s in symbols})


def symbols_of(chart):
    return sympy.symbols(chart.names)


def matrix(R):
    syms = symbols_of(R.chart)
    return sympy.Matrix([[to_sympy(x, syms) for x in row] for row in R.entries]), syms


def nijenhuis_index(M, syms):
    """N[j][k][i]: i-th component of T(e_j, e_k) from the coordinate formula."""
    n = len(syms)
    d = lambda f, l: sympy.diff(f, syms[l])
    out = [[[0] * n for _ in range(n)] for _ in range(n)]
    for j in range(n):
        for k in range(n):
            for i in range(n):
                v = 0
                for l in range(n):
                    v += M[l, j] * d(M[i, k], l) - M[l, k] * d(M[i, j], l)
                    v += M[i, l] * (d(M[l, j], k) - d(M[l, k], j))
                out[j][k][i] = sympy.expand(v)
    return out


def _apply(T, M, X, Y):
    """Bilinear extension of the component array T to column vectors."""
    n = M.shape[0]
    v = sympy.zeros(n, 1)
    for j in range(n):
        for k in range(n):
            c = X[j] * Y[k]
            if c != 0:
                v += c * sympy.Matrix(T[j][k])
    return v


def haantjes_defining(M, syms):
    T = nijenhuis_index(M, syms)
    n = len(syms)
    M2 = M * M
    out = [[[0] * n for _ in range(n)] for _ in range(n)]
    for j in range(n):
        for k in range(n):
            ej, ek = sympy.eye(n)[:, j], sympy.eye(n)[:, k]
            v = (M2 * _apply(T, M, ej, ek) - M * _apply(T, M, M * ej, ek)
                 - M * _apply(T, M, ej, M * ek) + _apply(T, M, M * ej, M * ek))
            out[j][k] = [sympy.expand(x) for x in v]
    return out


def equal_components(lib_tensor12, oracle, syms) -> bool:
    n = len(syms)
    for j in range(n):
        for k in range(n):
            for i in range(n):
                a = to_sympy(lib_tensor12.components[j][k][i], syms)
                if sympy.cancel(a - oracle[j][k][i]) != 0:
                    return False
    return True


def jacobi_obstruction(P, syms):
    n = len(syms)
    d = lambda f, m: sympy.diff(f, syms[m])
    J = {}
    for i in range(n):
        for j in range(n):
            for k in range(n):
                J[i, j, k] = sympy.expand(sum(
                    P[i, m] * d(P[j, k], m) + P[j, m] * d(P[k, i], m) + P[k, m] * d(P[i, j], m)
                    for m in range(n)
                ))
    return J


def wdvv_residuals(F, syms):
    n = len(syms)
    h = sympy.hessian(F, syms)
    parts = [h.diff(s) for s in syms]
    inv = parts[0].inv()
    return {(i, j): sympy.simplify(parts[i] * inv * parts[j] - parts[j] * inv * parts[i])
            for i in range(n) for j in range(i + 1, n)}
