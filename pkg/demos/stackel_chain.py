"""
Stackel systems and Lenard-Haantjes chains
==========================================

A Stackel matrix gives diagonal Haantjes operators on the cotangent chart;
the chain ``dH_{j+1} = dH K_j`` reproduces the Stackel integrals.
"""

from haantjes import StackelSpec, cotangent_chart, lenard_haantjes_chain, stackel_build, verify_sympl_haantjes
from haantjes.bundle import load_bundle
from haantjes.chains import ChainObstructionError, SymplecticHaantjesSpec

C = cotangent_chart(2)
q1, q2 = C.var("q1"), C.var("q2")

# two degrees of freedom, with a cubic and a quadratic potential
spec = StackelSpec(C, ((1, q1), (1, -q2)), (q1 ** 3, q2 ** 2))
sh, H = stackel_build(spec)
print("H  =", H)
print("K1 =", sh.operators[1])
print(verify_sympl_haantjes(sh).render())

chain = lenard_haantjes_chain(sh, H)
print(chain.render())

# three degrees of freedom with a Vandermonde matrix
C3 = cotangent_chart(3)
x = [C3.var(f"q{i}") for i in (1, 2, 3)]
sh3, H3 = stackel_build(StackelSpec(C3, tuple((1, xi, xi ** 2) for xi in x)))
print("H =", H3)
print(lenard_haantjes_chain(sh3, H3).render())

# a perturbed operator breaks closedness of dH K1
b = load_bundle("stackel_2dof_perturbed")
pert = SymplecticHaantjesSpec(b.chart, tuple(b.tensor(n) for n in b.spec("symplectic_haantjes")["operators"]))
try:
    lenard_haantjes_chain(pert, b.scalar("H"))
except ChainObstructionError as exc:
    print(exc.report.render())
