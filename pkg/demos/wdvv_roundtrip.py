"""
From a WDVV potential to a Magri-Lenard complex and back
=========================================================
"""

from haantjes import WDVVProblem, hessian, ml_to_wdvv, verify_magri_lenard, wdvv_check, wdvv_to_ml
from haantjes.exprcore import Chart
from haantjes.wdvv import SingularH1Error, structure_constants

chart = Chart(("x1", "x2", "x3"))
F = chart.parse("1/2*x1^2*x3 + 1/2*x1*x2^2 + 1/4*x2^2*x3^2 + 1/60*x3^5")
problem = WDVVProblem(chart, F)
print(wdvv_check(problem).render())

# operators solve h1 R_k = dh/dx^k; the seed is d/dx1 and theta = d(h_11)
spec = wdvv_to_ml(problem)
for k, R in enumerate(spec.operators, 1):
    print(f"R{k} =", R)
print("theta =", spec.theta)
print(verify_magri_lenard(spec).render())

# the pairings <theta_ij, R_k X> are the third derivatives of F
c = structure_constants(spec)
print("c_223 =", c[1, 1, 2], " c_333 =", c[2, 2, 2])

# back again: F is recovered up to terms of degree < 3
G = ml_to_wdvv(spec)
print("recovered F =", G)
print("same Hessian:", hessian(WDVVProblem(chart, G)).h == hessian(problem).h)

# a potential whose h1 is singular has no complex
try:
    wdvv_check(WDVVProblem(chart, chart.parse("x1*x2*x3")))
except SingularH1Error as exc:
    print("x1*x2*x3:", exc)
