"""WDVV equations and their correspondence with Magri-Lenard complexes.

For a potential ``F`` with Hessian ``h`` and ``h1 = dh/dx^1`` invertible,
the WDVV system is the pairwise commutativity of ``h1^{-1} dh/dx^i``.
:func:`wdvv_to_ml` builds the complex with operators defined by
``h1 R_k = dh/dx^k`` (row convention), seed ``d/dx^1`` and 1-form
``d(h_11)``; :func:`ml_to_wdvv` recovers ``F`` from a complex given in flat
coordinates.
"""
from __future__ import annotations

from dataclasses import dataclass

from . import linalg
from .exprcore import Chart, RationalFn
from .geom import NotClosedError, OneForm, Tensor11, VectorField, d0, d1, pair, potential_of_closed
from .reports import VerificationReport, Witness, check_from_failures
from .structures import MLComplexSpec, lenard_forms, verify_magri_lenard

__all__ = [
    "WDVVProblem",
    "HessianField",
    "SingularH1Error",
    "WDVVFailure",
    "DependentFormsError",
    "NonFlatSeedError",
    "AsymmetricCError",
    "hessian",
    "wdvv_check",
    "wdvv_to_ml",
    "ml_to_wdvv",
    "structure_constants",
]


class SingularH1Error(ValueError):
    pass


class WDVVFailure(ValueError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class DependentFormsError(ValueError):
    pass


class NonFlatSeedError(ValueError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class AsymmetricCError(ValueError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class WDVVProblem:
    chart: Chart
    F: RationalFn

    def __post_init__(self):
        if self.F.chart != self.chart:
            raise ValueError("potential lives on a different chart")
        if not self.F.is_polynomial():
            raise ValueError("WDVV potential must be a polynomial")


@dataclass(frozen=True)
class HessianField:
    h: tuple
    h1: tuple

    def partial(self, k: int) -> tuple:
        """``dh/dx^k`` for a 0-based index ``k``."""
        return tuple(tuple(x.diff_index(k) for x in row) for row in self.h)


def hessian(problem: WDVVProblem) -> HessianField:
    F = problem.F
    n = problem.chart.dim
    grad = [F.diff_index(i) for i in range(n)]
    h = tuple(tuple(grad[i].diff_index(j) for j in range(n)) for i in range(n))
    h1 = tuple(tuple(x.diff_index(0) for x in row) for row in h)
    return HessianField(h, h1)


def _require_invertible_h1(hf: HessianField):
    if not linalg.det(hf.h1):
        raise SingularH1Error("dh/dx^1 is singular (its determinant is the zero function)")


def wdvv_check(problem: WDVVProblem) -> VerificationReport:
    """Residuals ``h_i h1^{-1} h_j - h_j h1^{-1} h_i`` for all i < j."""
    hf = hessian(problem)
    _require_invertible_h1(hf)
    n = problem.chart.dim
    parts = [hf.partial(k) for k in range(n)]
    # h1^{-1} h_j, one solve per j
    solved = [linalg.solve(hf.h1, parts[j]) for j in range(n)]
    fails = []
    for i in range(n):
        for j in range(i + 1, n):
            res = linalg.sub(linalg.matmul(parts[i], solved[j]), linalg.matmul(parts[j], solved[i]))
            bad = [(a, b) for a in range(n) for b in range(n) if res[a][b]]
            if bad:
                a, b = bad[0]
                fails.append(Witness((i + 1, j + 1), res[a][b], f"residual entry ({a + 1},{b + 1})"))
    return VerificationReport([check_from_failures("wdvv", "WDVV residuals vanish", fails)])


def wdvv_to_ml(problem: WDVVProblem) -> MLComplexSpec:
    chart = problem.chart
    n = chart.dim
    hf = hessian(problem)
    _require_invertible_h1(hf)
    report = wdvv_check(problem)
    if not report.passed:
        raise WDVVFailure("potential does not satisfy WDVV:\n" + report.render(), report)
    # rows of h1 are the forms theta_{1j} = d(h_1j); independence = invertibility
    ops = []
    for k in range(n):
        try:
            Rk = linalg.solve(hf.h1, hf.partial(k))
        except linalg.SingularMatrixError as exc:
            raise DependentFormsError("forms theta_1j are linearly dependent") from exc
        ops.append(Tensor11(chart, Rk))
    e1 = VectorField.basis(chart, 0)
    for k, R in enumerate(ops):
        if R @ e1 != VectorField.basis(chart, k):
            raise AssertionError(f"R_{k + 1} d/dx^1 != d/dx^{k + 1}")
    spec = MLComplexSpec(chart, tuple(ops), d0(hf.h[0][0]), e1)
    verified = verify_magri_lenard(spec)
    if not verified.passed:
        raise AssertionError("WDVV complex failed verification:\n" + verified.render())
    return spec


def structure_constants(spec: MLComplexSpec) -> dict:
    """``c[i, j, k] = <theta_ij, X_k>`` (0-based), with ``X_k = R_k X``."""
    forms = lenard_forms(spec)
    fields = [R @ spec.seed for R in spec.operators]
    n = spec.chart.dim
    return {(i, j, k): pair(forms[i, j], fields[k]) for i in range(n) for j in range(n) for k in range(n)}


def ml_to_wdvv(spec: MLComplexSpec) -> RationalFn:
    """Potential ``F`` of a complex whose fields ``R_k X`` are ``d/dx^k``.

    ``F`` and its first derivatives vanish at the origin.
    """
    chart = spec.chart
    n = chart.dim
    report = verify_magri_lenard(spec)
    if not report.passed:
        raise ValueError("not a Magri-Lenard complex:\n" + report.render())
    for k, R in enumerate(spec.operators):
        field = R @ spec.seed
        if field != VectorField.basis(chart, k):
            raise NonFlatSeedError(
                f"R_{k + 1} X = {field} is not d/dx^{k + 1}",
                witness=Witness((k + 1,), field.components, "R_k X"),
            )
    forms = lenard_forms(spec)
    for (i, j), form in forms.items():
        if not d1(form).is_zero():
            raise NotClosedError(f"theta R_{i + 1} R_{j + 1} is not closed", witness=((i + 1, j + 1), form.components))
    c = structure_constants(spec)
    for (i, j, k), v in c.items():
        for other in ((j, i, k), (i, k, j), (k, j, i)):
            if c[other] != v:
                raise AsymmetricCError(
                    f"c_{i + 1}{j + 1}{k + 1} != c at permuted indices {tuple(x + 1 for x in other)}",
                    witness=Witness((i + 1, j + 1, k + 1), v - c[other], "c difference"),
                )
    a = [[potential_of_closed(forms[i, j]) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if a[i][j].diff_index(k) != a[i][k].diff_index(j):
                    raise AsymmetricCError(
                        f"da_{i + 1}{j + 1}/dx^{k + 1} is not symmetric",
                        witness=Witness((i + 1, j + 1, k + 1), a[i][j].diff_index(k) - a[i][k].diff_index(j)),
                    )
    gradient = [potential_of_closed(OneForm(chart, tuple(a[i]))) for i in range(n)]
    F = potential_of_closed(OneForm(chart, tuple(gradient)))
    check = wdvv_check(WDVVProblem(chart, F))
    if not check.passed:
        raise WDVVFailure("recovered potential fails WDVV:\n" + check.render(), check)
    return F
