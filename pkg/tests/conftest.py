import random
import sys
from fractions import Fraction

import pytest

from haantjes.exprcore import Chart
from haantjes.geom import OneForm, Tensor11, VectorField

U3 = Chart(("u1", "u2", "u3"))
X2 = Chart(("x1", "x2"))
X3 = Chart(("x1", "x2", "x3"))


def random_poly(rng: random.Random, chart: Chart, degree: int, terms: int = 3, zero_prob: float = 0.0):
    """Sparse polynomial with small rational coefficients, total degree <= degree."""
    if zero_prob and rng.random() < zero_prob:
        return chart.zero()
    acc = chart.zero()
    for _ in range(rng.randint(1, terms)):
        mono = chart.const(Fraction(rng.randint(-5, 5), rng.randint(1, 3)))
        budget = rng.randint(0, degree)
        for _ in range(budget):
            mono = mono * chart.var(rng.choice(chart.names))
        acc = acc + mono
    return acc


def random_tensor(rng: random.Random, chart: Chart, degree: int = 2, zero_prob: float = 0.3) -> Tensor11:
    n = chart.dim
    return Tensor11(chart, [[random_poly(rng, chart, degree, zero_prob=zero_prob) for _ in range(n)] for _ in range(n)])


def random_chart(rng: random.Random) -> Chart:
    return X2 if rng.random() < 0.4 else X3


def magri_data():
    """The R^3 Magri-Lenard example: K, K2 = K^2 + u1 Id, theta = du1, X = d/du3."""
    P = U3.parse
    K = Tensor11(U3, [[0, 2, 0], [P("-u1"), 0, 2], [P("-1/2*u2"), 0, 0]])
    K2 = K @ K + P("u1") * Tensor11.identity(U3)
    return K, K2, OneForm.basis(U3, 0), VectorField.basis(U3, 2)


@pytest.fixture
def magri():
    return magri_data()


@pytest.fixture
def rng():
    return random.Random(1234)


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    results = getattr(acceptance, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
