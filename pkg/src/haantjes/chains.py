"""Symplectic-Haantjes structures on cotangent charts and Lenard-Haantjes chains.

Charts are laid out as ``(q1..qn, p1..pn)`` with ``omega = sum dq^i ^ dp_i``,
whose matrix is ``[[0, I], [-I, 0]]``.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import flint

from . import linalg
from .exprcore import Chart, PoleError, RationalFn
from .geom import Tensor11, TwoForm, as_fn, coapply11, d0, d1, rational_potential
from .reports import FAIL, PASS, Check, VerificationReport, Witness, check_from_failures
from .torsion import haantjes

__all__ = [
    "SymplecticHaantjesSpec",
    "StackelSpec",
    "ChainReport",
    "ChainObstructionError",
    "MalformedChainSpecError",
    "SingularStackelError",
    "cotangent_chart",
    "omega_matrix",
    "canonical_omega",
    "canonical_poisson",
    "default_probes",
    "verify_sympl_haantjes",
    "lenard_haantjes_chain",
    "stackel_build",
]


class MalformedChainSpecError(ValueError):
    pass


class SingularStackelError(ValueError):
    pass


class ChainObstructionError(ValueError):
    """``dH K_j`` is not closed; carries the witness and the chain built so far."""

    def __init__(self, message, witness=None, report=None):
        super().__init__(message)
        self.witness = witness
        self.report = report


def cotangent_chart(n: int) -> Chart:
    return Chart(tuple(f"q{i}" for i in range(1, n + 1)) + tuple(f"p{i}" for i in range(1, n + 1)))


def _half_dim(chart: Chart) -> int:
    if chart.dim % 2:
        raise MalformedChainSpecError(f"cotangent chart must be even-dimensional, got {chart.dim}")
    return chart.dim // 2


def omega_matrix(chart: Chart) -> tuple:
    n = _half_dim(chart)
    one, z = chart.one(), chart.zero()
    rows = [[z] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        rows[i][n + i] = one
        rows[n + i][i] = -one
    return tuple(tuple(r) for r in rows)


def canonical_omega(chart: Chart) -> TwoForm:
    return TwoForm(chart, omega_matrix(chart))


def canonical_poisson(f: RationalFn, g: RationalFn, n: Optional[int] = None) -> RationalFn:
    """``{f, g} = sum_i df/dq^i dg/dp_i - df/dp_i dg/dq^i``."""
    chart = f.chart
    half = _half_dim(chart)
    if n is not None and n != half:
        raise MalformedChainSpecError(f"chart has {half} degrees of freedom, not {n}")
    acc = chart.zero()
    for i in range(half):
        acc = acc + f.diff_index(i) * g.diff_index(half + i) - f.diff_index(half + i) * g.diff_index(i)
    return acc


@dataclass(frozen=True)
class SymplecticHaantjesSpec:
    chart: Chart
    operators: tuple

    def __post_init__(self):
        ops = tuple(self.operators)
        object.__setattr__(self, "operators", ops)
        n = _half_dim(self.chart)
        if len(ops) != n:
            raise MalformedChainSpecError(f"need {n} operators on a {2 * n}-dimensional chart, got {len(ops)}")
        if any(K.chart != self.chart for K in ops):
            raise MalformedChainSpecError("operator on a different chart")
        if not ops[0].is_identity():
            raise MalformedChainSpecError("K_0 must be the identity")

    @property
    def n(self) -> int:
        return self.chart.dim // 2

    @property
    def omega(self) -> TwoForm:
        return canonical_omega(self.chart)


@dataclass(frozen=True)
class StackelSpec:
    """Stackel matrix ``S`` (row i depends on ``q^i`` only) and potentials ``U_i(q^i)``."""

    chart: Chart
    S: tuple
    potentials: tuple = ()

    def __post_init__(self):
        n = _half_dim(self.chart)
        S = tuple(tuple(as_fn(self.chart, x) for x in row) for row in self.S)
        if len(S) != n or any(len(row) != n for row in S):
            raise MalformedChainSpecError(f"Stackel matrix must be {n}x{n}")
        U = tuple(as_fn(self.chart, u) for u in self.potentials) or tuple(self.chart.zero() for _ in range(n))
        if len(U) != n:
            raise MalformedChainSpecError(f"need {n} potentials, got {len(U)}")
        for i in range(n):
            for f in S[i] + (U[i],):
                if f.chart != self.chart:
                    raise MalformedChainSpecError("Stackel data on a different chart")
                for v in range(self.chart.dim):
                    if v != i and f.diff_index(v):
                        raise MalformedChainSpecError(
                            f"row {i + 1} entry {f} depends on {self.chart.names[v]}, not only on q{i + 1}"
                        )
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "potentials", U)

    @property
    def n(self) -> int:
        return len(self.S)


@dataclass
class ChainReport:
    hamiltonians: list
    checks: list
    brackets: tuple = ()
    forms: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    @property
    def overall(self) -> str:
        return PASS if self.passed else FAIL

    def __getitem__(self, id: str) -> Check:
        for c in self.checks:
            if c.id == id:
                return c
        raise KeyError(id)

    def to_dict(self):
        d = VerificationReport(self.checks, notes=self.notes).to_dict()
        d["overall"] = self.overall
        d["hamiltonians"] = [str(h) for h in self.hamiltonians]
        d["brackets"] = [[str(b) for b in row] for row in self.brackets]
        return d

    def render(self) -> str:
        lines = []
        for j, h in enumerate(self.hamiltonians, 1):
            lines.append(f"H{j} = {h}")
        for j, form in enumerate(self.forms):
            lines.append(f"dH K{j} = {form}")
        body = VerificationReport(self.checks, notes=self.notes).render().splitlines()
        lines.extend(body[:-1])
        lines.append(f"overall: {self.overall.upper()}")
        return "\n".join(lines)


def default_probes(chart: Chart) -> list:
    """``1, q^i, p_i``: the finite coefficient set used for the module axiom."""
    return [chart.one()] + [chart.var(name) for name in chart.names]


def _constant_independent(ops: Sequence[Tensor11], seed: int = 7) -> bool:
    """Linear independence over the constants, by exact rank at sample points.

    Full rank at sample points proves independence; rank deficiency at every
    sample is reported as dependence.
    """
    chart = ops[0].chart
    rng = random.Random(seed)
    columns = []
    attempts = 0
    while len(columns) < 4 and attempts < 40:
        attempts += 1
        point = [Fraction(rng.randint(-7, 7), rng.randint(1, 4)) for _ in range(chart.dim)]
        try:
            columns.append([[x.eval_at(point) for row in K.entries for x in row] for K in ops])
        except PoleError:
            continue
    width = sum(len(c[0]) for c in columns)
    flat = []
    for k in range(len(ops)):
        for c in columns:
            flat.extend(flint.fmpq(v.numerator, v.denominator) for v in c[k])
    return flint.fmpq_mat(len(ops), width, flat).rank() == len(ops)


def verify_sympl_haantjes(spec: SymplecticHaantjesSpec, probe_fns: Optional[Sequence[RationalFn]] = None) -> VerificationReport:
    """Check the symplectic-Haantjes axioms.

    (i) ``Omega K_i`` is skew for every i; (ii) ``H`` vanishes on every
    combination ``sum f_a K_a`` with coefficients from ``probe_fns``;
    (iii) the products ``K_i K_j`` commute and are Haantjes; plus linear
    independence of the ``K_i`` over the constants.
    """
    chart = spec.chart
    ops = spec.operators
    probes = default_probes(chart) if probe_fns is None else list(probe_fns)
    omega = omega_matrix(chart)
    dim = chart.dim

    fails = []
    for i, K in enumerate(ops):
        m = linalg.matmul(omega, K.entries)
        bad = [(a, b) for a in range(dim) for b in range(a, dim) if m[a][b] != -m[b][a]]
        if bad:
            a, b = bad[0]
            fails.append(Witness((i, a + 1, b + 1), m[a][b] + m[b][a], "(Omega K_i) + (Omega K_i)^T entry"))
    checks = [check_from_failures("i", "omega-flat K_i skew", fails)]

    # |probes|^n combinations; the route cross-check is left to direct haantjes calls
    fails = []
    for coeffs in itertools.product(range(len(probes)), repeat=len(ops)):
        combo = Tensor11.zero(chart)
        for a, K in zip(coeffs, ops):
            combo = combo + probes[a] * K
        nz = haantjes(combo, check_routes=False).nonzero_components()
        if nz:
            (r, s), v = nz[0]
            fails.append(Witness(tuple(c + 1 for c in coeffs) + (r + 1, s + 1), v, "H of probe combination"))
    checks.append(
        check_from_failures("ii", "probe combinations are Haantjes", fails,
                            detail="probes: " + ", ".join(str(p) for p in probes))
    )

    fails = []
    for i in range(len(ops)):
        for j in range(i, len(ops)):
            prod = ops[i] @ ops[j]
            if prod != ops[j] @ ops[i]:
                comm = prod - ops[j] @ ops[i]
                a, b = next((a, b) for a in range(dim) for b in range(dim) if comm.entries[a][b])
                fails.append(Witness((i, j, a + 1, b + 1), comm.entries[a][b], "[K_i, K_j] entry"))
                continue
            nz = haantjes(prod, check_routes=False).nonzero_components()
            if nz:
                (r, s), v = nz[0]
                fails.append(Witness((i, j, r + 1, s + 1), v, "H of K_i K_j"))
    checks.append(check_from_failures("iii", "products commute and are Haantjes", fails))

    independent = _constant_independent(ops)
    checks.append(Check("independent", PASS if independent else FAIL, "K_i linearly independent over constants"))
    return VerificationReport(checks)


def lenard_haantjes_chain(spec: SymplecticHaantjesSpec, H: RationalFn) -> ChainReport:
    """Hamiltonians ``H_{j+1}`` with ``d H_{j+1} = dH K_j`` and their brackets.

    Operator indices in witnesses are 0-based, matching ``K_0 = Id``.
    Raises :class:`ChainObstructionError` at the first non-closed form.
    """
    dH = d0(H)
    hams, forms, checks = [], [], []
    for j, K in enumerate(spec.operators):
        form = coapply11(dH, K)
        forms.append(form)
        nz = d1(form).nonzero_components()
        if nz:
            (a, b), v = nz[0]
            w = Witness((j, a + 1, b + 1), v, "d(dH K_j)")
            checks.append(Check(f"closed_K{j}", FAIL, f"dH K{j} closed", w))
            report = ChainReport(hams, checks, forms=forms, notes=[f"chain stopped at K{j}"])
            raise ChainObstructionError(f"dH K{j} = {form} is not closed", witness=w, report=report)
        Hj = rational_potential(form)
        if d0(Hj) != form:
            raise AssertionError(f"recovered potential of dH K{j} does not reproduce the form")
        hams.append(Hj)
        checks.append(Check(f"closed_K{j}", PASS, f"dH K{j} closed"))
    brackets = tuple(tuple(canonical_poisson(a, b) for b in hams) for a in hams)
    fails = [
        Witness((i + 1, j + 1), brackets[i][j], "{H_i, H_j}")
        for i in range(len(hams))
        for j in range(i + 1, len(hams))
        if brackets[i][j]
    ]
    checks.append(check_from_failures("involution", "Hamiltonians pairwise in involution", fails))
    return ChainReport(hams, checks, brackets, forms)


def stackel_build(spec: StackelSpec):
    """``(SymplecticHaantjesSpec, H)`` of a Stackel system.

    ``H = sum_i (S^-1)[0][i] (p_i^2 / 2 + U_i)`` and
    ``K_j = diag((S^-1)[j][i] / (S^-1)[0][i])`` repeated on the q and p slots.
    """
    chart = spec.chart
    n = spec.n
    if not linalg.det(spec.S):
        raise SingularStackelError("Stackel matrix is singular")
    inv = linalg.inverse(spec.S)
    if any(not w for w in inv[0]):
        raise SingularStackelError("first row of the inverse Stackel matrix has a zero entry")
    half = chart.const(Fraction(1, 2))
    H = chart.zero()
    for i in range(n):
        p = chart.var(chart.names[n + i])
        H = H + inv[0][i] * (half * p * p + spec.potentials[i])
    ops = []
    for j in range(n):
        ratios = [inv[j][i] / inv[0][i] for i in range(n)]
        ops.append(Tensor11.diag(chart, ratios + ratios))
    sh = SymplecticHaantjesSpec(chart, tuple(ops))
    report = verify_sympl_haantjes(sh)
    if not report.passed:
        raise AssertionError("Stackel construction failed the symplectic-Haantjes axioms:\n" + report.render())
    for K in ops:
        if haantjes(K).nonzero_components():
            raise AssertionError("diagonal Stackel operator has nonzero Haantjes torsion")
    chain = lenard_haantjes_chain(sh, H)
    for j in range(n):
        expected = chart.zero()
        for i in range(n):
            p = chart.var(chart.names[n + i])
            expected = expected + inv[j][i] * (half * p * p + spec.potentials[i])
        if d0(chain.hamiltonians[j]) != d0(expected):
            raise AssertionError(f"chain Hamiltonian H{j + 1} differs from the Stackel integral")
    if not chain.passed:
        raise AssertionError("Stackel chain is not in involution:\n" + chain.render())
    return sh, H
