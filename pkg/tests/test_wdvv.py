import random

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from haantjes.bundle import load_bundle
from haantjes.exprcore import Chart
from haantjes.geom import OneForm, Tensor11, VectorField, d0
from haantjes.structures import MLComplexSpec, verify_magri_lenard
from haantjes.wdvv import (
    NonFlatSeedError,
    SingularH1Error,
    WDVVFailure,
    WDVVProblem,
    hessian,
    ml_to_wdvv,
    structure_constants,
    wdvv_check,
    wdvv_to_ml,
)

from conftest import U3, X2, X3, random_poly
from oracles import symbols_of, to_sympy, wdvv_residuals

GOLDEN_F = X3.parse("1/2*x1^2*x3 + 1/2*x1*x2^2 + 1/4*x2^2*x3^2 + 1/60*x3^5")
X1 = Chart(("x1",))


def one_var(chart, name, degree, rng):
    """Random polynomial in a single coordinate."""
    acc = chart.zero()
    for m in range(degree + 1):
        acc = acc + rng.randint(-4, 4) * chart.var(name) ** m
    return acc


class TestHessian:
    def test_cubic(self):
        hf = hessian(WDVVProblem(X2, X2.parse("x1^2*x2 + x2^3")))
        P = X2.parse
        assert hf.h == ((P("2*x2"), P("2*x1")), (P("2*x1"), P("6*x2")))
        assert hf.h1 == ((X2.zero(), X2.const(2)), (X2.const(2), X2.zero()))
        assert hf.partial(1) == ((X2.const(2), X2.zero()), (X2.zero(), X2.const(6)))

    def test_symmetric(self, rng):
        for _ in range(10):
            hf = hessian(WDVVProblem(X3, random_poly(rng, X3, 5, terms=5)))
            for i in range(3):
                for j in range(3):
                    assert hf.h[i][j] == hf.h[j][i]

    def test_rejects_rational(self):
        with pytest.raises(ValueError):
            WDVVProblem(X2, 1 / X2.var("x1"))


class TestCheck:
    def test_golden(self):
        assert wdvv_check(WDVVProblem(X3, GOLDEN_F)).passed

    def test_two_variables_always_pass(self):
        # F = 1/2 x1^2 x2 + x1 a(x2) + g(x2) has h1 = [[0, 1], [1, a'']]
        rng = random.Random(77)
        for _ in range(50):
            F = X2.parse("1/2*x1^2*x2") + X2.var("x1") * one_var(X2, "x2", 3, rng) + one_var(X2, "x2", 6, rng)
            assert wdvv_check(WDVVProblem(X2, F)).passed

    @given(st.lists(st.integers(-9, 9), min_size=1, max_size=5), st.lists(st.integers(-9, 9), max_size=7))
    @settings(max_examples=30, deadline=None)
    def test_two_variable_family(self, a, g):
        x1, x2 = X2.var("x1"), X2.var("x2")
        F = X2.parse("1/2*x1^2*x2")
        F = F + x1 * sum((c * x2 ** m for m, c in enumerate(a)), X2.zero())
        F = F + sum((c * x2 ** m for m, c in enumerate(g)), X2.zero())
        assert wdvv_check(WDVVProblem(X2, F)).passed

    def test_singular_h1(self):
        with pytest.raises(SingularH1Error):
            wdvv_check(WDVVProblem(X3, X3.parse("x1*x2*x3")))

    def test_perturbed_golden_fails(self):
        report = wdvv_check(WDVVProblem(X3, GOLDEN_F + X3.parse("x2^4")))
        assert not report.passed
        assert report["wdvv"].witness.indices[0] < report["wdvv"].witness.indices[1]

    def test_against_oracle(self):
        syms = symbols_of(X3)
        for F in (GOLDEN_F, GOLDEN_F + X3.parse("x2^3*x3"), GOLDEN_F + X3.parse("x3^4")):
            ref = wdvv_residuals(to_sympy(F, syms), syms)
            oracle_pass = all(m.is_zero_matrix for m in ref.values())
            assert wdvv_check(WDVVProblem(X3, F)).passed == oracle_pass
        assert not wdvv_check(WDVVProblem(X3, GOLDEN_F + X3.parse("x2^3*x3"))).passed


class TestToML:
    def test_golden_operators(self):
        b = load_bundle("wdvv_n3_golden")
        spec = wdvv_to_ml(WDVVProblem(X3, GOLDEN_F))
        assert spec.operators[0].is_identity()
        assert spec.operators[1] == b.tensor("R2")
        assert spec.operators[2] == b.tensor("R3")
        assert spec.theta == OneForm.basis(X3, 2)
        assert spec.seed == VectorField.basis(X3, 0)

    def test_fields_are_coordinate_vectors_and_operators_commute(self):
        spec = wdvv_to_ml(WDVVProblem(X3, GOLDEN_F))
        for k, R in enumerate(spec.operators):
            assert R @ spec.seed == VectorField.basis(X3, k)
            for S in spec.operators:
                assert R @ S == S @ R

    def test_two_variables(self):
        spec = wdvv_to_ml(WDVVProblem(X2, X2.parse("1/2*x1^2*x2 + x1*x2^2")))
        assert verify_magri_lenard(spec).passed
        assert spec.theta == d0(X2.var("x2"))

    def test_singular_example(self):
        with pytest.raises(SingularH1Error):
            wdvv_to_ml(WDVVProblem(X2, X2.parse("x1*x2^2")))

    def test_failing_potential(self):
        with pytest.raises(WDVVFailure) as info:
            wdvv_to_ml(WDVVProblem(X3, GOLDEN_F + X3.parse("x2^4")))
        assert not info.value.report.passed


class TestFromML:
    def test_round_trip_hessian(self):
        spec = wdvv_to_ml(WDVVProblem(X3, GOLDEN_F))
        F = ml_to_wdvv(spec)
        assert hessian(WDVVProblem(X3, F)).h == hessian(WDVVProblem(X3, GOLDEN_F)).h
        assert F == GOLDEN_F

    def test_round_trip_two_variables(self):
        rng = random.Random(3)
        for _ in range(10):
            G = X2.parse("1/2*x1^2*x2") + X2.var("x1") * one_var(X2, "x2", 3, rng) + one_var(X2, "x2", 5, rng)
            F = ml_to_wdvv(wdvv_to_ml(WDVVProblem(X2, G)))
            # the complex only sees third derivatives; quadratic terms of G are lost
            assert all(
                F.diff_index(i).diff_index(j).diff_index(k) == G.diff_index(i).diff_index(j).diff_index(k)
                for i in range(2) for j in range(2) for k in range(2)
            )
            assert F.eval_at((0, 0)) == 0

    def test_normalised_at_origin(self):
        G = GOLDEN_F + X3.parse("x1*x2 + 3*x3 - 7")
        F = ml_to_wdvv(wdvv_to_ml(WDVVProblem(X3, G)))
        assert F == GOLDEN_F

    def test_one_variable(self):
        spec = MLComplexSpec(X1, (Tensor11.identity(X1),), OneForm.basis(X1, 0), VectorField.basis(X1, 0))
        assert ml_to_wdvv(spec) == X1.parse("1/6*x1^3")

    def test_non_flat_seed(self, magri):
        K, K2, theta, X = magri
        with pytest.raises(NonFlatSeedError) as info:
            ml_to_wdvv(MLComplexSpec(U3, (Tensor11.identity(U3), K, K2), theta, X))
        assert info.value.witness.indices == (1,)


class TestStructureConstants:
    def test_three_routes(self):
        spec = wdvv_to_ml(WDVVProblem(X3, GOLDEN_F))
        c = structure_constants(spec)
        syms = symbols_of(X3)
        Fs = to_sympy(GOLDEN_F, syms)
        for (i, j, k), v in c.items():
            assert v == GOLDEN_F.diff_index(i).diff_index(j).diff_index(k)
            assert sympy.expand(to_sympy(v, syms) - sympy.diff(Fs, syms[i], syms[j], syms[k])) == 0

    def test_symmetry(self):
        c = structure_constants(wdvv_to_ml(WDVVProblem(X3, GOLDEN_F)))
        for (i, j, k), v in c.items():
            assert v == c[j, i, k] == c[i, k, j]
        assert c[0, 0, 2] == X3.const(1)
