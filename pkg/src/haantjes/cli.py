"""Command-line front end.

Exit status: 0 when every check passes or a computation succeeds, 1 when a
verification fails, 2 on input or usage errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import chains, structures, wdvv
from .bundle import BundleError, GeometryBundle, builtin_names, load_bundle
from .exprcore import ExprError, PoleError
from .geom import NotClosedError, Tensor12
from .reports import FAIL, PASS, Check, VerificationReport
from .torsion import haantjes, higher_haantjes, higher_nijenhuis, nijenhuis

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _tensor12_dict(T: Tensor12) -> dict:
    return {f"{i + 1},{j + 1}": [str(x) for x in v] for (i, j), v in T.nonzero_components()}


def _tensor_rows(R) -> list:
    return [[str(x) for x in row] for row in R.entries]


def _computed(result: dict, lines: list, notes=()) -> tuple:
    payload = {"overall": PASS, "checks": [], "result": result}
    if notes:
        payload["notes"] = list(notes)
    return EXIT_OK, payload, "\n".join(lines + [f"note: {n}" for n in notes])


def _from_report(report, extra=None) -> tuple:
    payload = report.to_dict()
    if extra:
        payload["result"] = extra
    return (EXIT_OK if report.passed else EXIT_FAIL), payload, report.render()


def _failure(id: str, message: str, witness=None) -> tuple:
    """A domain precondition that failed, reported like a failed check."""
    report = VerificationReport([Check(id, FAIL, message, witness)])
    return EXIT_FAIL, report.to_dict(), report.render()


def _torsion_text(symbol: str, T: Tensor12) -> list:
    if T.is_zero():
        return [f"{symbol} = 0"]
    return [f"{symbol}(e{i + 1}, e{j + 1}) = ({', '.join(str(x) for x in v)})" for (i, j), v in T.nonzero_components()]


def _context(bundle: GeometryBundle, args):
    if getattr(args, "space", None):
        return bundle.bracket_space(args.space)
    return None


def _required(value, flag):
    if not value:
        raise UsageError(f"{flag} is required for this command")
    return value


def cmd_torsion(bundle, args):
    R = bundle.tensor(_required(args.tensor, "--tensor"))
    T = nijenhuis(R, _context(bundle, args))
    return _computed({"torsion": _tensor12_dict(T)}, _torsion_text("T", T))


def cmd_haantjes(bundle, args):
    R = bundle.tensor(_required(args.tensor, "--tensor"))
    H = haantjes(R, _context(bundle, args))
    return _computed({"haantjes": _tensor12_dict(H)}, _torsion_text("H", H))


def cmd_higher(bundle, args):
    R = bundle.tensor(_required(args.tensor, "--tensor"))
    if args.k < 1:
        raise UsageError("--k must be a positive integer")
    ctx = _context(bundle, args)
    T = higher_nijenhuis(R, ctx, args.k)
    H = higher_haantjes(R, ctx, args.k)
    lines = _torsion_text(f"T^({args.k})", T) + _torsion_text(f"H^({args.k})", H)
    return _computed({"k": args.k, "nijenhuis": _tensor12_dict(T), "haantjes": _tensor12_dict(H)}, lines)


def _parse_point(text: str):
    try:
        return tuple(Fraction(x.strip()) for x in text.split(","))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad sample point {text!r}; expected comma-separated rationals") from None


def cmd_diag(bundle, args):
    R = bundle.tensor(_required(args.tensor, "--tensor"))
    samples = [_parse_point(s) for s in args.sample] if args.sample else None
    if samples and any(len(p) != bundle.chart.dim for p in samples):
        raise UsageError(f"sample points need {bundle.chart.dim} coordinates")
    report = structures.diagnose_diagonalizability(R, samples)
    code, payload, text = _from_report(report)
    return (EXIT_OK if report.verdict == structures.DIAGONALIZABLE else EXIT_FAIL), payload, text


def _ml_spec(bundle, args) -> structures.MLComplexSpec:
    """The bundle's complex; ``--form`` and ``--field`` override theta and the seed."""
    spec = bundle.spec("magri_lenard")
    try:
        return structures.MLComplexSpec(
            bundle.chart,
            tuple(bundle.tensor(n) for n in spec["operators"]),
            bundle.one_form(args.form or spec["theta"]),
            bundle.vector_field(args.field or spec["seed"]),
        )
    except structures.MalformedSpecError as exc:
        raise BundleError(str(exc), "/specs/magri_lenard") from None


def _sh_spec(bundle) -> chains.SymplecticHaantjesSpec:
    spec = bundle.spec("symplectic_haantjes")
    try:
        return chains.SymplecticHaantjesSpec(bundle.chart, tuple(bundle.tensor(n) for n in spec["operators"]))
    except chains.MalformedChainSpecError as exc:
        raise BundleError(str(exc), "/specs/symplectic_haantjes") from None


def _pair(bundle) -> structures.PoissonPair:
    spec = bundle.spec("poisson_pair")
    return structures.PoissonPair(bundle.bivector(spec["P1"]), bundle.bivector(spec["P2"]))


def cmd_verify(bundle, args):
    if args.what == "ml":
        return _from_report(structures.verify_magri_lenard(_ml_spec(bundle, args)))
    if args.what == "poisson":
        return _from_report(structures.is_poisson(bundle.bivector(_required(args.tensor, "--tensor"))))
    if args.what == "compat":
        return _from_report(structures.compatible(_pair(bundle)))
    spec = bundle.spec("symplectic_haantjes")
    probes = [bundle.scalar(n) for n in spec["probes"]] if "probes" in spec else None
    return _from_report(chains.verify_sympl_haantjes(_sh_spec(bundle), probes))


def cmd_wdvv(bundle, args):
    if args.what == "from-ml":
        try:
            F = wdvv.ml_to_wdvv(_ml_spec(bundle, args))
        except wdvv.NonFlatSeedError as exc:
            return _failure("flat_seed", str(exc), exc.witness)
        except wdvv.AsymmetricCError as exc:
            return _failure("symmetric_c", str(exc), exc.witness)
        except NotClosedError as exc:
            return _failure("closed", str(exc))
        return _computed({"F": str(F)}, [f"F = {F}"])
    problem = wdvv.WDVVProblem(bundle.chart, bundle.scalar(bundle.spec("wdvv")["F"]))
    try:
        if args.what == "check":
            return _from_report(wdvv.wdvv_check(problem))
        spec = wdvv.wdvv_to_ml(problem)
    except wdvv.SingularH1Error as exc:
        return _failure("h1_invertible", str(exc))
    except wdvv.WDVVFailure as exc:
        return _from_report(exc.report)
    lines = [f"R{k + 1} = {R}" for k, R in enumerate(spec.operators)]
    lines += [f"theta = {spec.theta}", f"X = {spec.seed}"]
    result = {"operators": [_tensor_rows(R) for R in spec.operators],
              "theta": [str(x) for x in spec.theta.components],
              "seed": [str(x) for x in spec.seed.components]}
    return _computed(result, lines)


def _chain(sh, H):
    try:
        report = chains.lenard_haantjes_chain(sh, H)
    except chains.ChainObstructionError as exc:
        report = exc.report
    return report


def cmd_chain(bundle, args):
    spec = bundle.spec("symplectic_haantjes")
    if "hamiltonian" not in spec:
        raise BundleError("symplectic_haantjes spec has no hamiltonian", "/specs/symplectic_haantjes")
    report = _chain(_sh_spec(bundle), bundle.scalar(spec["hamiltonian"]))
    return (EXIT_OK if report.passed else EXIT_FAIL), report.to_dict(), report.render()


STACKEL_NOTE = (
    "operators use the first-row-normalized inverse Stackel matrix with eigenvalues repeated "
    "on the momentum slots; this construction is validated only through the axiom checks"
)


def cmd_stackel(bundle, args):
    raw = bundle.spec("stackel")
    try:
        st = chains.StackelSpec(bundle.chart, raw["S"], raw.get("potentials", ()))
        sh, H = chains.stackel_build(st)
    except chains.SingularStackelError as exc:
        return _failure("stackel_invertible", str(exc))
    except chains.MalformedChainSpecError as exc:
        raise BundleError(str(exc), "/specs/stackel") from None
    report = chains.lenard_haantjes_chain(sh, H)
    report.notes.append(STACKEL_NOTE)
    payload = report.to_dict()
    payload["result"] = {"operators": [_tensor_rows(K) for K in sh.operators]}
    lines = [f"K{j} = {K}" for j, K in enumerate(sh.operators)]
    return (EXIT_OK if report.passed else EXIT_FAIL), payload, "\n".join(lines + [report.render()])


def cmd_biham(bundle, args):
    raw = bundle.spec("poisson_pair")
    for key in ("H1", "H2"):
        if key not in raw:
            raise BundleError(f"poisson_pair spec has no {key}", "/specs/poisson_pair")
    pair = _pair(bundle)
    try:
        spec = structures.bihamiltonian_complex(pair, bundle.scalar(raw["H1"]), bundle.scalar(raw["H2"]), raw.get("length"))
    except structures.SingularPoissonError as exc:
        return _failure("p1_invertible", str(exc))
    except structures.HamiltonianMismatchError as exc:
        return _failure("hamiltonians_match", str(exc), exc.witness)
    except structures.NotNijenhuisError as exc:
        return _failure("nijenhuis", str(exc))
    except structures.MalformedSpecError as exc:
        raise BundleError(str(exc), "/specs/poisson_pair") from None
    report = structures.verify_magri_lenard(spec)
    lines = [f"R^{k} = {R}" for k, R in enumerate(spec.operators)]
    code, payload, text = _from_report(report, {"operators": [_tensor_rows(R) for R in spec.operators]})
    return code, payload, "\n".join(lines + [text])


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--bundle", required=True, help="bundle file or built-in fixture: " + ", ".join(builtin_names()))
    common.add_argument("--json", action="store_true", help="emit the report as JSON")
    common.add_argument("--tensor", help="name of a tensor in the bundle")
    common.add_argument("--form", help="name of a 1-form in the bundle")
    common.add_argument("--field", help="name of a vector field in the bundle")
    common.add_argument("--space", help="bracket space to use instead of the Lie bracket")

    parser = argparse.ArgumentParser(prog="haantjes", description="Nijenhuis and Haantjes torsions and related structures.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("torsion", parents=[common], help="Nijenhuis torsion").set_defaults(run=cmd_torsion)
    sub.add_parser("haantjes", parents=[common], help="Haantjes torsion").set_defaults(run=cmd_haantjes)
    p = sub.add_parser("higher", parents=[common], help="higher Nijenhuis and Haantjes torsions")
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(run=cmd_higher)
    p = sub.add_parser("diag", parents=[common], help="diagonalizability diagnostic")
    p.add_argument("--sample", action="append", help="sample point, e.g. 1,2,1/3 (repeatable)")
    p.set_defaults(run=cmd_diag)
    p = sub.add_parser("verify", parents=[common], help="verify a structure")
    p.add_argument("what", choices=["ml", "poisson", "compat", "sh"])
    p.set_defaults(run=cmd_verify)
    p = sub.add_parser("wdvv", parents=[common], help="WDVV checks and conversions")
    p.add_argument("what", choices=["check", "to-ml", "from-ml"])
    p.set_defaults(run=cmd_wdvv)
    sub.add_parser("chain", parents=[common], help="Lenard-Haantjes chain").set_defaults(run=cmd_chain)
    sub.add_parser("stackel", parents=[common], help="build a Stackel system").set_defaults(run=cmd_stackel)
    sub.add_parser("biham", parents=[common], help="bi-Hamiltonian Magri-Lenard complex").set_defaults(run=cmd_biham)
    return parser


def run(argv=None) -> tuple:
    """Execute a command line; returns ``(exit_code, stdout_text, stderr_text)``."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (exc.code if isinstance(exc.code, int) else EXIT_USAGE), "", ""
    try:
        bundle = load_bundle(args.bundle)
        code, payload, text = args.run(bundle, args)
    except (BundleError, UsageError, ExprError, PoleError) as exc:
        if args.json:
            return EXIT_USAGE, json.dumps({"error": str(exc)}, indent=2), f"error: {exc}"
        return EXIT_USAGE, "", f"error: {exc}"
    if args.json:
        return code, json.dumps(payload, indent=2, sort_keys=True), ""
    return code, text, ""


def main(argv=None) -> int:
    code, out, err = run(argv)
    if out:
        print(out)
    if err:
        print(err, file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
