import random

import pytest
from hypothesis import given, settings

from haantjes.exprcore import Chart, ChartMismatchError
from haantjes.geom import (
    Bivector,
    NonPolynomialError,
    NonRationalPotentialError,
    NotClosedError,
    OneForm,
    Tensor11,
    TwoForm,
    VectorField,
    apply11,
    bivector_sharp,
    coapply11,
    d0,
    d1,
    is_closed,
    lie_bracket,
    lie_derivative,
    pair,
    potential_of_closed,
    rational_potential,
)

from conftest import U3, X3, random_poly
from strategies import polys

P = U3.parse


def vf(chart, *comps):
    return VectorField(chart, [chart.parse(c) if isinstance(c, str) else c for c in comps])


def form(chart, *comps):
    return OneForm(chart, [chart.parse(c) if isinstance(c, str) else c for c in comps])


def e(i):
    return VectorField.basis(U3, i)


def random_field(rng, chart, degree=2):
    return VectorField(chart, [random_poly(rng, chart, degree) for _ in range(chart.dim)])


def random_form(rng, chart, degree=2):
    return OneForm(chart, [random_poly(rng, chart, degree) for _ in range(chart.dim)])


class TestContainers:
    def test_length_checked(self):
        with pytest.raises(ValueError):
            VectorField(U3, [1, 2])
        with pytest.raises(ValueError):
            Tensor11(U3, [[1, 0], [0, 1]])

    def test_skew_checked(self):
        with pytest.raises(ValueError):
            TwoForm(U3, [[0, 1, 0], [1, 0, 0], [0, 0, 0]])
        with pytest.raises(ValueError):
            Bivector(U3, [[1, 0, 0], [0, 0, 0], [0, 0, 0]])

    def test_chart_mismatch(self):
        with pytest.raises(ChartMismatchError):
            lie_bracket(e(0), VectorField.basis(X3, 0))

    def test_one_form_prints_as_row(self):
        assert str(form(U3, "-u1", "0", "4")) == "(-u1)*du1 + (4)*du3"


class TestLieBracket:
    def test_coordinate_fields_commute(self):
        assert lie_bracket(e(0), e(1)).is_zero()

    def test_bracket_inside_haantjes_k(self):
        assert lie_bracket(vf(U3, "0", "-u1", "-1/2*u2"), vf(U3, "2", "0", "0")) == vf(U3, "0", "2", "0")

    def test_hand_leibniz(self):
        assert lie_bracket(vf(U3, "0", "u1", "0"), vf(U3, "u2", "0", "0")) == vf(U3, "u1", "-u2", "0")

    def test_jacobi_and_skew(self):
        rng = random.Random(11)
        for _ in range(50):
            X, Y, Z = (random_field(rng, X3) for _ in range(3))
            assert lie_bracket(X, Y) == -lie_bracket(Y, X)
            jac = (lie_bracket(X, lie_bracket(Y, Z)) + lie_bracket(Y, lie_bracket(Z, X))
                   + lie_bracket(Z, lie_bracket(X, Y)))
            assert jac.is_zero()

    def test_bilinear_over_rationals(self):
        rng = random.Random(12)
        X, Y, Z = (random_field(rng, X3) for _ in range(3))
        assert lie_bracket(3 * X + Z, Y) == 3 * lie_bracket(X, Y) + lie_bracket(Z, Y)


class TestActions:
    def test_k_e2(self, magri):
        K, K2, theta, X = magri
        assert apply11(K, e(1)) == 2 * e(0)
        assert K2 @ e(2) == vf(U3, "4", "0", "u1")
        assert Tensor11.identity(U3) @ X == X

    def test_theta_k(self, magri):
        K, K2, theta, X = magri
        assert coapply11(theta, K) == form(U3, "0", "2", "0")
        assert theta @ K2 == form(U3, "-u1", "0", "4")
        assert theta @ Tensor11.identity(U3) == theta

    def test_duality(self):
        rng = random.Random(13)
        for _ in range(30):
            th, X = random_form(rng, X3), random_field(rng, X3)
            R = Tensor11(X3, [[random_poly(rng, X3, 2) for _ in range(3)] for _ in range(3)])
            assert pair(coapply11(th, R), X) == pair(th, apply11(R, X))

    def test_pairing(self):
        assert pair(form(U3, "1", "0", "0"), e(0)) == 1
        assert pair(form(U3, "-u1", "0", "4"), vf(U3, "4", "0", "u1")) == 0
        assert pair(form(U3, "0", "2", "0"), 2 * e(1)) == 4


class TestExterior:
    def test_examples(self):
        assert is_closed(form(U3, "1", "0", "0"))
        theta4 = form(U3, "-2*u2", "-4*u1", "0")
        assert not is_closed(theta4)
        assert d1(theta4).components[0][1] == -2
        assert is_closed(form(U3, "u1^2", "-4*u2", "0"))

    @given(polys(X3, 4))
    @settings(max_examples=50, deadline=None)
    def test_d_squared_zero(self, f):
        assert d1(d0(f)).is_zero()


class TestPotentials:
    @pytest.mark.parametrize("comps, expected", [
        (("0", "2", "0"), "2*u2"),
        (("-u1", "0", "4"), "-1/2*u1^2 + 4*u3"),
        (("1", "0", "0"), "u1"),
    ])
    def test_examples(self, comps, expected):
        f = potential_of_closed(form(U3, *comps))
        assert f == P(expected)
        assert d0(f) == form(U3, *comps)

    def test_not_closed_witness(self):
        with pytest.raises(NotClosedError) as info:
            potential_of_closed(form(U3, "-2*u2", "-4*u1", "0"))
        (i, j), value = info.value.witness
        assert (i, j) == (0, 1) and value == -2

    def test_poles_rejected(self):
        with pytest.raises(NonPolynomialError):
            potential_of_closed(form(U3, "1/u1", "0", "0"))

    @given(polys(X3, 4))
    @settings(max_examples=50, deadline=None)
    def test_right_inverse_of_gradient(self, f):
        g = potential_of_closed(d0(f))
        assert d0(g) == d0(f)
        assert g.eval_at([0, 0, 0]) == 0

    def test_rational_potential(self):
        c = Chart(("q1", "q2", "p1", "p2"))
        H = c.parse("(q2*p1^2 + q1*p2^2)/(2*(q1 + q2))")
        G = rational_potential(d0(H))
        assert d0(G) == d0(H)
        assert rational_potential(d0(c.parse("q1^2*p2"))) == c.parse("q1^2*p2")

    def test_logarithmic_potential_rejected(self):
        with pytest.raises(NonRationalPotentialError):
            rational_potential(form(U3, "1/u1", "0", "0"))


class TestLieDerivative:
    def test_invariance_in_example(self, magri):
        K, K2, theta, X = magri
        assert lie_derivative(X, theta).is_zero()
        assert lie_derivative(X, K).is_zero()

    def test_cartan_example(self):
        assert lie_derivative(e(0), form(U3, "u1", "0", "0")) == form(U3, "1", "0", "0")

    def test_tensor_rule(self):
        rng = random.Random(14)
        X, Y = random_field(rng, X3), random_field(rng, X3)
        R = Tensor11(X3, [[random_poly(rng, X3, 2) for _ in range(3)] for _ in range(3)])
        LR = lie_derivative(X, R)
        assert LR @ Y == lie_bracket(X, R @ Y) - R @ lie_bracket(X, Y)

    def test_derivation_of_pairing(self):
        rng = random.Random(15)
        for _ in range(20):
            X, Y, th = random_field(rng, X3), random_field(rng, X3), random_form(rng, X3)
            assert X(pair(th, Y)) == pair(lie_derivative(X, th), Y) + pair(th, lie_bracket(X, Y))


class TestBivector:
    def test_hamilton_equations(self):
        c = Chart(("q", "p"))
        P2 = Bivector.canonical(c)
        assert bivector_sharp(P2, d0(c.parse("1/2*p^2"))) == VectorField(c, [c.var("p"), c.zero()])
        assert bivector_sharp(P2, d0(c.parse("1/2*q^2"))) == VectorField(c, [c.zero(), -c.var("q")])

    def test_linearity(self):
        c = Chart(("q", "p"))
        assert bivector_sharp(Bivector.canonical(c), OneForm(c, [0, 0])).is_zero()
        zero = Bivector(c, [[0, 0], [0, 0]])
        assert zero(OneForm(c, [c.var("q"), 1])).is_zero()
