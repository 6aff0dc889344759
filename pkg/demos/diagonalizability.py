"""
Haantjes torsion as a diagonalizability test
============================================
"""

from haantjes import Tensor11, diag_torsion_formula, diagnose_diagonalizability, haantjes, nijenhuis
from haantjes.exprcore import Chart

chart = Chart(("x1", "x2", "x3"))
x1, x2, x3 = (chart.var(n) for n in chart.names)

# a diagonal operator always has vanishing Haantjes torsion
lams = [x2 * x3, x1 + x3, x1 ** 2]
D = Tensor11.diag(chart, lams)
print("T_D == closed form:", nijenhuis(D) == diag_torsion_formula(lams))
print("H_D = 0:", haantjes(D).is_zero())

# conjugating by a frame field hides the diagonal form; for this P the
# eigen-distributions stay integrable, so H still vanishes
P = Tensor11(chart, [[1, x2, 0], [0, 1, x3], [0, 0, 1]])
Pinv = Tensor11(chart, [[1, -x2, x2 * x3], [0, 1, -x3], [0, 0, 1]])
M = Pinv @ D @ P
print("M =", M)
print("H_M = 0:", haantjes(M).is_zero())
# eigenvalues x2*x3, x1 + x3, x1^2 collide at (1, 1, 1), so sample elsewhere
print(diagnose_diagonalizability(M, [(1, 2, 3), (2, -1, 5)]).render())

# a nilpotent Jordan block: H = 0 but the spectrum is not simple
J = Tensor11(chart, [[0, 1, 0], [0, 0, 1], [0, 0, 0]])
print(diagnose_diagonalizability(J).render())

# an operator with nonzero Haantjes torsion
R = Tensor11(chart, [[0, 1, 0], [x1, 0, x3], [1, x2, 0]])
print(diagnose_diagonalizability(R).render())
