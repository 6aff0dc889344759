"""Verifiers and constructors for recursion-operator structures.

Covers diagonalizability diagnostics, Magri-Lenard complexes, Poisson
bivectors and compatible pairs, and the passage from a bi-Hamiltonian
system to a Magri-Lenard complex through ``R = P2 P1^{-1}``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import flint

from . import linalg
from .exprcore import Chart, ChartMismatchError, PoleError, RationalFn
from .geom import (
    Bivector,
    OneForm,
    Tensor11,
    Tensor12,
    VectorField,
    bivector_sharp,
    coapply11,
    d0,
    d1,
    lie_bracket,
)
from .reports import Check, VerificationReport, Witness, check_from_failures
from .torsion import RouteDisagreementError, haantjes, nijenhuis

__all__ = [
    "MLComplexSpec",
    "PoissonPair",
    "MalformedSpecError",
    "SingularPoissonError",
    "HamiltonianMismatchError",
    "NotNijenhuisError",
    "DIAGONALIZABLE",
    "NOT_DIAGONALIZABLE",
    "INCONCLUSIVE",
    "diag_torsion_formula",
    "diagnose_diagonalizability",
    "default_samples",
    "lenard_forms",
    "verify_magri_lenard",
    "poisson_obstruction",
    "is_poisson",
    "compatible",
    "bihamiltonian_complex",
]

DIAGONALIZABLE = "DIAGONALIZABLE"
NOT_DIAGONALIZABLE = "NOT_DIAGONALIZABLE"
INCONCLUSIVE = "INCONCLUSIVE"


class MalformedSpecError(ValueError):
    pass


class SingularPoissonError(ValueError):
    pass


class HamiltonianMismatchError(ValueError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotNijenhuisError(ValueError):
    pass


@dataclass(frozen=True)
class MLComplexSpec:
    """Candidate Magri-Lenard complex: operators ``R_1 = Id, ..., R_n``, a 1-form and a seed field."""

    chart: Chart
    operators: tuple
    theta: OneForm
    seed: VectorField

    def __post_init__(self):
        ops = tuple(self.operators)
        object.__setattr__(self, "operators", ops)
        if len(ops) != self.chart.dim:
            raise MalformedSpecError(f"need {self.chart.dim} operators (one per dimension), got {len(ops)}")
        for R in ops:
            if R.chart != self.chart:
                raise MalformedSpecError("operator on a different chart")
        if not ops[0].is_identity():
            raise MalformedSpecError("the first operator must be the identity")
        if self.theta.chart != self.chart or self.seed.chart != self.chart:
            raise MalformedSpecError("1-form or seed field on a different chart")


@dataclass(frozen=True)
class PoissonPair:
    P1: Bivector
    P2: Bivector

    def __post_init__(self):
        if self.P1.chart != self.P2.chart:
            raise ChartMismatchError(f"{self.P1.chart} vs {self.P2.chart}")

    @property
    def chart(self) -> Chart:
        return self.P1.chart

    @property
    def p1_invertible(self) -> bool:
        return bool(linalg.det(self.P1.components))


# ---------------------------------------------------------------------------
# diagonal tensors and diagonalizability
# ---------------------------------------------------------------------------

def diag_torsion_formula(lambdas: Sequence[RationalFn]) -> Tensor12:
    """Torsion of ``diag(lambda_1, ..., lambda_n)`` from the closed formula

    T(d_i, d_j) = (l_i - l_j) (d l_i/dx^j d_i + d l_j/dx^i d_j),

    cross-checked against :func:`~haantjes.torsion.nijenhuis`.
    """
    lambdas = tuple(lambdas)
    chart = lambdas[0].chart
    if len(lambdas) != chart.dim:
        raise ValueError(f"need {chart.dim} eigenvalues, got {len(lambdas)}")

    def value(i, j):
        v = [chart.zero()] * chart.dim
        gap = lambdas[i] - lambdas[j]
        v[i] = gap * lambdas[i].diff_index(j)
        v[j] = gap * lambdas[j].diff_index(i)
        return v

    T = Tensor12.from_function(chart, value)
    direct = nijenhuis(Tensor11.diag(chart, lambdas))
    if direct != T:
        raise RouteDisagreementError("diagonal torsion formula disagrees with the Nijenhuis torsion")
    return T


def _rand_point(rng: random.Random, dim: int):
    return tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(dim))


def default_samples(R: Tensor11, seed: int = 20180611, count: int = 2):
    """All-ones point plus seeded pseudorandom rational points, skipping poles."""
    rng = random.Random(seed)
    candidates = [tuple(Fraction(1) for _ in range(R.dim))]
    out = []
    for _ in range(50):
        p = candidates.pop(0) if candidates else _rand_point(rng, R.dim)
        try:
            _evaluate_matrix(R, p)
        except PoleError:
            continue
        out.append(p)
        if len(out) == count:
            break
    return out


def _evaluate_matrix(R: Tensor11, point):
    return [[x.eval_at(point) for x in row] for row in R.entries]


_LAMBDA = Chart(("t",))


def _charpoly(values):
    n = len(values)
    flat = [flint.fmpq(v.numerator, v.denominator) for row in values for v in row]
    return flint.fmpq_mat(n, n, flat).charpoly()


def _poly_text(cp) -> str:
    """Univariate flint polynomial in the expression grammar, variable ``t``."""
    t = _LAMBDA.var("t")
    acc = _LAMBDA.zero()
    for e, c in enumerate(cp.coeffs()):
        if c:
            acc = acc + _LAMBDA.const(Fraction(int(c.p), int(c.q))) * t ** e
    return str(acc)


def diagnose_diagonalizability(R: Tensor11, samples: Optional[Sequence] = None, *, seed: int = 20180611) -> VerificationReport:
    """Three-valued diagonalizability verdict.

    DIAGONALIZABLE: the Haantjes torsion vanishes and the characteristic
    polynomial is squarefree at every sample point.  NOT_DIAGONALIZABLE: the
    Haantjes torsion is nonzero.  INCONCLUSIVE: it vanishes but some sample
    has a repeated eigenvalue.
    """
    if samples is None:
        samples = default_samples(R, seed)
        if not samples:
            raise PoleError("no pole-free default sample point found")
    samples = [tuple(Fraction(x) for x in p) for p in samples]
    if not samples:
        raise ValueError("need at least one sample point")
    H = haantjes(R)
    h_fail = [Witness((i + 1, j + 1), v, "H") for (i, j), v in H.nonzero_components()]
    checks = [check_from_failures("haantjes", "Haantjes torsion vanishes", h_fail)]
    spec_fail = []
    for s, p in enumerate(samples, 1):
        cp = _charpoly(_evaluate_matrix(R, p))
        if cp.gcd(cp.derivative()).degree() > 0:
            spec_fail.append(Witness((s,), [str(x) for x in p] + [_poly_text(cp)], "sample point and charpoly"))
    checks.append(
        check_from_failures("simple_spectrum", "characteristic polynomial squarefree at samples", spec_fail,
                            detail=f"{len(samples)} sample point(s)")
    )
    if h_fail:
        verdict = NOT_DIAGONALIZABLE
    elif spec_fail:
        verdict = INCONCLUSIVE
    else:
        verdict = DIAGONALIZABLE
    notes = ["samples: " + "; ".join("(" + ", ".join(str(x) for x in p) + ")" for p in samples)]
    return VerificationReport(checks, verdict=verdict, notes=notes)


# ---------------------------------------------------------------------------
# Magri-Lenard complexes
# ---------------------------------------------------------------------------

def lenard_forms(spec: MLComplexSpec) -> dict:
    """``{(k, l): theta R_k R_l}`` with 0-based operator indices."""
    out = {}
    ops = spec.operators
    for k, Rk in enumerate(ops):
        first = coapply11(spec.theta, Rk)
        for l, Rl in enumerate(ops):
            out[(k, l)] = coapply11(first, Rl)
    return out


def verify_magri_lenard(spec: MLComplexSpec) -> VerificationReport:
    """Check the complex axioms, each reported separately.

    A. the operators commute pairwise;
    B. the fields ``R_k X`` commute pairwise;
    C. every ``theta R_k R_l`` is closed;
    D. every ``R_k`` has vanishing Haantjes torsion.
    """
    ops = spec.operators
    n = len(ops)

    fails = []
    for k in range(n):
        for l in range(k + 1, n):
            comm = linalg.sub(linalg.matmul(ops[k].entries, ops[l].entries), linalg.matmul(ops[l].entries, ops[k].entries))
            bad = [(a, b) for a in range(n) for b in range(n) if comm[a][b]]
            if bad:
                a, b = bad[0]
                fails.append(Witness((k + 1, l + 1), comm[a][b], f"[R_k,R_l] entry ({a + 1},{b + 1})"))
    checks = [check_from_failures("A", "operators commute", fails)]

    fields = [ops[k] @ spec.seed for k in range(n)]
    fails = []
    for k in range(n):
        for l in range(k + 1, n):
            br = lie_bracket(fields[k], fields[l])
            if not br.is_zero():
                fails.append(Witness((k + 1, l + 1), br.components, "[R_k X, R_l X]"))
    checks.append(check_from_failures("B", "fields R_k X commute", fails))

    fails = []
    for (k, l), form in lenard_forms(spec).items():
        if not d1(form).is_zero():
            fails.append(Witness((k + 1, l + 1), form.components, "theta R_k R_l"))
    checks.append(check_from_failures("C", "1-forms theta R_k R_l closed", fails))

    fails = []
    for k, R in enumerate(ops):
        nz = haantjes(R).nonzero_components()
        if nz:
            (i, j), v = nz[0]
            fails.append(Witness((k + 1, i + 1, j + 1), v, "H_{R_k}(e_i,e_j)"))
    checks.append(check_from_failures("D", "operators are Haantjes", fails))
    return VerificationReport(checks)


# ---------------------------------------------------------------------------
# Poisson structures
# ---------------------------------------------------------------------------

def poisson_obstruction(P: Bivector):
    """Jacobi obstruction ``J[i][j][k] = sum_m P^im d_m P^jk + P^jm d_m P^ki + P^km d_m P^ij``."""
    chart = P.chart
    n = chart.dim
    p = P.components
    dp = [[[p[a][b].diff_index(m) for m in range(n)] for b in range(n)] for a in range(n)]

    def term(i, j, k):
        acc = chart.zero()
        for m in range(n):
            if p[i][m] and dp[j][k][m]:
                acc = acc + p[i][m] * dp[j][k][m]
        return acc

    return tuple(
        tuple(tuple(term(i, j, k) + term(j, k, i) + term(k, i, j) for k in range(n)) for j in range(n))
        for i in range(n)
    )


def is_poisson(P: Bivector) -> VerificationReport:
    J = poisson_obstruction(P)
    n = P.chart.dim
    fails = [
        Witness((i + 1, j + 1, k + 1), J[i][j][k], "J")
        for i in range(n)
        for j in range(i + 1, n)
        for k in range(j + 1, n)
        if J[i][j][k]
    ]
    return VerificationReport([check_from_failures("jacobi", "Jacobi identity", fails)])


def compatible(pair: PoissonPair) -> VerificationReport:
    checks = []
    for id, P in (("P1", pair.P1), ("P2", pair.P2), ("P1+P2", pair.P1 + pair.P2)):
        c = is_poisson(P).checks[0]
        checks.append(Check(id, c.status, f"{id} is Poisson", c.witness, failures=c.failures))
    return VerificationReport(checks)


def bihamiltonian_complex(pair: PoissonPair, H1: RationalFn, H2: RationalFn, length: Optional[int] = None) -> MLComplexSpec:
    """Magri-Lenard complex of a bi-Hamiltonian field ``X = P1 dH1 = P2 dH2``.

    Returns operators ``Id, R, ..., R^(length-1)`` with ``R = P2 P1^{-1}``,
    ``theta = dH1`` and seed ``X``.  Raises unless ``R`` is Nijenhuis and the
    result passes :func:`verify_magri_lenard`.
    """
    chart = pair.chart
    length = chart.dim if length is None else length
    if not pair.p1_invertible:
        raise SingularPoissonError("P1 is singular (its determinant is the zero function)")
    X = bivector_sharp(pair.P1, d0(H1))
    X2 = bivector_sharp(pair.P2, d0(H2))
    for i, (a, b) in enumerate(zip(X.components, X2.components)):
        if a != b:
            raise HamiltonianMismatchError(
                f"P1 dH1 != P2 dH2 in component {i + 1}: {a} vs {b}",
                witness=Witness((i + 1,), a - b, "P1 dH1 - P2 dH2"),
            )
    R = Tensor11(chart, linalg.matmul(pair.P2.components, linalg.inverse(pair.P1.components)))
    T = nijenhuis(R)
    if not T.is_zero():
        raise NotNijenhuisError(f"R = P2 P1^-1 is not a Nijenhuis operator: {T}")
    ops = [Tensor11.identity(chart)]
    for _ in range(length - 1):
        ops.append(ops[-1] @ R)
    spec = MLComplexSpec(chart, tuple(ops), d0(H1), X)
    report = verify_magri_lenard(spec)
    if not report.passed:
        raise AssertionError("bi-Hamiltonian complex failed verification:\n" + report.render())
    return spec
