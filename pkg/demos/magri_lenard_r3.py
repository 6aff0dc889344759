"""
A Magri-Lenard complex on R^3
=============================

The recursion operator ``K`` below is not Nijenhuis, yet its Haantjes
torsion vanishes and, with ``K2 = K^2 + u1 Id``, it generates a complex.
"""

from haantjes import Tensor11, VectorField, haantjes, nijenhuis, verify_magri_lenard
from haantjes.bundle import load_bundle
from haantjes.geom import coapply11, d1
from haantjes.structures import MLComplexSpec

# the shipped fixture holds K, K2, theta = du1 and X = d/du3
b = load_bundle("magri_r3")
K, K2 = b.tensor("K"), b.tensor("K2")
theta, X = b.one_form("theta"), b.vector_field("X")
print("K  =", K)
print("K2 =", K2)

# Nijenhuis torsion is nonzero, Haantjes torsion vanishes
T = nijenhuis(K)
for (i, j), v in T.nonzero_components():
    print(f"T_K(e{i + 1}, e{j + 1}) =", VectorField(K.chart, v))
print("H_K  = 0:", haantjes(K).is_zero())
print("H_K2 = 0:", haantjes(K2).is_zero())

# the 1-forms theta K_i K_j are closed
for name, A in (("K", K), ("K2", K2)):
    for other, B in (("K", K), ("K2", K2)):
        form = coapply11(coapply11(theta, A), B)
        print(f"theta {name} {other} = {form}   closed: {d1(form).is_zero()}")

# powers of K alone do not stay closed
for k in range(1, 5):
    form = coapply11(theta, K ** k)
    print(f"theta K^{k} = {form}   closed: {d1(form).is_zero()}")

spec = MLComplexSpec(K.chart, (Tensor11.identity(K.chart), K, K2), theta, X)
print(verify_magri_lenard(spec).render())

# replacing K2 by K^3 breaks the complex
bad = MLComplexSpec(K.chart, (Tensor11.identity(K.chart), K, K ** 3), theta, X)
print(verify_magri_lenard(bad).render())
