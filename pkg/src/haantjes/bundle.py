"""JSON geometry bundles: a chart plus named tensors, forms, fields and specs.

Every expression is text in the :mod:`haantjes.exprcore` grammar.  The name
``Id`` always refers to the identity tensor.  Bivectors are stored with the
tensors as skew matrices.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema

from .exprcore import Chart, ExprError, RationalFn
from .geom import Bivector, OneForm, Tensor11, VectorField
from .torsion import BracketSpace

__all__ = [
    "BUNDLE_SCHEMA",
    "BundleError",
    "GeometryBundle",
    "builtin_names",
    "load_bundle",
    "loads_bundle",
    "bundle_from_dict",
]

_expr = {"type": ["string", "integer"]}
_row = {"type": "array", "items": _expr}
_matrix = {"type": "array", "items": _row}
_name = {"type": "string", "pattern": "^[A-Za-z][A-Za-z0-9_]*$"}
_names = {"type": "array", "items": _name}

BUNDLE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["chart"],
    "additionalProperties": False,
    "properties": {
        "description": {"type": "string"},
        "chart": {"type": "array", "minItems": 1, "items": _name},
        "tensors": {"type": "object", "additionalProperties": _matrix},
        "one_forms": {"type": "object", "additionalProperties": _row},
        "vector_fields": {"type": "object", "additionalProperties": _row},
        "scalars": {"type": "object", "additionalProperties": _expr},
        "bracket_spaces": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["dim", "constants"],
                "additionalProperties": False,
                "properties": {
                    "dim": {"type": "integer", "minimum": 1},
                    "constants": {
                        "type": "array",
                        "items": {
                            "type": "array",
                            "prefixItems": [{"type": "integer", "minimum": 1}] * 3 + [_expr],
                            "minItems": 4,
                            "maxItems": 4,
                        },
                    },
                },
            },
        },
        "specs": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "magri_lenard": {
                    "type": "object",
                    "required": ["operators", "theta", "seed"],
                    "additionalProperties": False,
                    "properties": {"operators": _names, "theta": _name, "seed": _name},
                },
                "wdvv": {
                    "type": "object",
                    "required": ["F"],
                    "additionalProperties": False,
                    "properties": {"F": _name},
                },
                "symplectic_haantjes": {
                    "type": "object",
                    "required": ["operators"],
                    "additionalProperties": False,
                    "properties": {"operators": _names, "hamiltonian": _name, "probes": _names},
                },
                "stackel": {
                    "type": "object",
                    "required": ["S"],
                    "additionalProperties": False,
                    "properties": {"S": _matrix, "potentials": _row},
                },
                "poisson_pair": {
                    "type": "object",
                    "required": ["P1", "P2"],
                    "additionalProperties": False,
                    "properties": {"P1": _name, "P2": _name, "H1": _name, "H2": _name, "length": {"type": "integer", "minimum": 1}},
                },
            },
        },
    },
}

_VALIDATOR = jsonschema.Draft202012Validator(BUNDLE_SCHEMA)


class BundleError(ValueError):
    """Malformed bundle; ``pointer`` is a JSON pointer to the offending node."""

    def __init__(self, message: str, pointer: str = ""):
        self.pointer = pointer
        super().__init__(f"{pointer or '/'}: {message}")


def _pointer(path) -> str:
    return "".join("/" + str(p).replace("~", "~0").replace("/", "~1") for p in path)


@dataclass(frozen=True)
class GeometryBundle:
    chart: Chart
    tensors: dict = field(default_factory=dict)
    one_forms: dict = field(default_factory=dict)
    vector_fields: dict = field(default_factory=dict)
    scalars: dict = field(default_factory=dict)
    bracket_spaces: dict = field(default_factory=dict)
    specs: dict = field(default_factory=dict)
    description: str = ""

    def tensor(self, name: str) -> Tensor11:
        if name == "Id":
            return Tensor11.identity(self.chart)
        try:
            return self.tensors[name]
        except KeyError:
            raise BundleError(f"no tensor named {name!r}", "/tensors") from None

    def bivector(self, name: str) -> Bivector:
        try:
            return Bivector(self.chart, self.tensor(name).entries)
        except ValueError as exc:
            raise BundleError(f"tensor {name!r} is not skew: {exc}", f"/tensors/{name}") from None

    def one_form(self, name: str) -> OneForm:
        try:
            return self.one_forms[name]
        except KeyError:
            raise BundleError(f"no 1-form named {name!r}", "/one_forms") from None

    def vector_field(self, name: str) -> VectorField:
        try:
            return self.vector_fields[name]
        except KeyError:
            raise BundleError(f"no vector field named {name!r}", "/vector_fields") from None

    def scalar(self, name: str) -> RationalFn:
        try:
            return self.scalars[name]
        except KeyError:
            raise BundleError(f"no scalar named {name!r}", "/scalars") from None

    def bracket_space(self, name: str) -> BracketSpace:
        try:
            return self.bracket_spaces[name]
        except KeyError:
            raise BundleError(f"no bracket space named {name!r}", "/bracket_spaces") from None

    def spec(self, kind: str) -> dict:
        try:
            return self.specs[kind]
        except KeyError:
            raise BundleError(f"bundle has no {kind!r} spec", "/specs") from None

    def to_dict(self) -> dict:
        """Canonical JSON form; expressions are printed in canonical order."""
        out: dict[str, Any] = {}
        if self.description:
            out["description"] = self.description
        out["chart"] = list(self.chart.names)
        out["tensors"] = {k: [[str(x) for x in row] for row in v.entries] for k, v in self.tensors.items()}
        out["one_forms"] = {k: [str(x) for x in v.components] for k, v in self.one_forms.items()}
        out["vector_fields"] = {k: [str(x) for x in v.components] for k, v in self.vector_fields.items()}
        out["scalars"] = {k: str(v) for k, v in self.scalars.items()}
        out["bracket_spaces"] = {
            k: {
                "dim": s.dim,
                "constants": [
                    [i + 1, j + 1, m + 1, str(s.constants[i][j][m])]
                    for i in range(s.dim)
                    for j in range(i + 1, s.dim)
                    for m in range(s.dim)
                    if s.constants[i][j][m]
                ],
            }
            for k, s in self.bracket_spaces.items()
        }
        specs = {}
        for kind, spec in self.specs.items():
            if kind == "stackel":
                spec = dict(spec)
                spec["S"] = [[str(x) for x in row] for row in spec["S"]]
                if "potentials" in spec:
                    spec["potentials"] = [str(x) for x in spec["potentials"]]
            specs[kind] = spec
        out["specs"] = specs
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"


def _parse(chart: Chart, text, path) -> RationalFn:
    try:
        return chart.parse(str(text))
    except ExprError as exc:
        raise BundleError(str(exc), _pointer(path)) from None


def _row(chart: Chart, row, path) -> tuple:
    if len(row) != chart.dim:
        raise BundleError(f"expected {chart.dim} entries, got {len(row)}", _pointer(path))
    return tuple(_parse(chart, x, path + [i]) for i, x in enumerate(row))


def _matrix_of(chart: Chart, rows, path, size=None) -> tuple:
    size = chart.dim if size is None else size
    if len(rows) != size:
        raise BundleError(f"expected {size} rows, got {len(rows)}", _pointer(path))
    out = []
    for i, row in enumerate(rows):
        if len(row) != size:
            raise BundleError(f"expected {size} entries, got {len(row)}", _pointer(path + [i]))
        out.append(tuple(_parse(chart, x, path + [i, j]) for j, x in enumerate(row)))
    return tuple(out)


def _const(chart: Chart, text, path):
    f = _parse(chart, text, path)
    if not f.is_constant():
        raise BundleError("structure constant must be a number", _pointer(path))
    return f.constant_value()


def bundle_from_dict(data: dict) -> GeometryBundle:
    errors = sorted(_VALIDATOR.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise BundleError(f"schema violation: {err.message}", _pointer(err.absolute_path))
    names = data["chart"]
    try:
        chart = Chart(tuple(names))
    except ValueError as exc:
        raise BundleError(str(exc), "/chart") from None
    tensors = {k: Tensor11(chart, _matrix_of(chart, v, ["tensors", k])) for k, v in data.get("tensors", {}).items()}
    if "Id" in tensors:
        raise BundleError("'Id' is reserved for the identity", "/tensors/Id")
    forms = {k: OneForm(chart, _row(chart, v, ["one_forms", k])) for k, v in data.get("one_forms", {}).items()}
    fields = {k: VectorField(chart, _row(chart, v, ["vector_fields", k])) for k, v in data.get("vector_fields", {}).items()}
    scalars = {k: _parse(chart, v, ["scalars", k]) for k, v in data.get("scalars", {}).items()}
    spaces = {}
    for k, v in data.get("bracket_spaces", {}).items():
        path = ["bracket_spaces", k, "constants"]
        items = {}
        for n, (i, j, m, c) in enumerate(v["constants"]):
            if max(i, j, m) > v["dim"]:
                raise BundleError(f"index exceeds dim {v['dim']}", _pointer(path + [n]))
            items[(i - 1, j - 1, m - 1)] = _const(chart, c, path + [n, 3])
        try:
            spaces[k] = BracketSpace(v["dim"], items)
        except ValueError as exc:
            raise BundleError(str(exc), _pointer(path)) from None

    specs = {}
    raw_specs = data.get("specs", {})

    def need(table, ref, path, what):
        if ref != "Id" or what != "tensor":
            if ref not in table:
                raise BundleError(f"dangling reference to {what} {ref!r}", _pointer(path))

    for kind, spec in raw_specs.items():
        base = ["specs", kind]
        if kind == "magri_lenard":
            for n, ref in enumerate(spec["operators"]):
                need(tensors, ref, base + ["operators", n], "tensor")
            need(forms, spec["theta"], base + ["theta"], "1-form")
            need(fields, spec["seed"], base + ["seed"], "vector field")
            specs[kind] = {"operators": list(spec["operators"]), "theta": spec["theta"], "seed": spec["seed"]}
        elif kind == "wdvv":
            need(scalars, spec["F"], base + ["F"], "scalar")
            specs[kind] = {"F": spec["F"]}
        elif kind == "symplectic_haantjes":
            for n, ref in enumerate(spec["operators"]):
                need(tensors, ref, base + ["operators", n], "tensor")
            out = {"operators": list(spec["operators"])}
            if "hamiltonian" in spec:
                need(scalars, spec["hamiltonian"], base + ["hamiltonian"], "scalar")
                out["hamiltonian"] = spec["hamiltonian"]
            if "probes" in spec:
                for n, ref in enumerate(spec["probes"]):
                    need(scalars, ref, base + ["probes", n], "scalar")
                out["probes"] = list(spec["probes"])
            specs[kind] = out
        elif kind == "stackel":
            if chart.dim % 2:
                raise BundleError("stackel spec needs an even-dimensional chart", _pointer(base))
            n = chart.dim // 2
            out = {"S": _matrix_of(chart, spec["S"], base + ["S"], size=n)}
            if "potentials" in spec:
                pots = spec["potentials"]
                if len(pots) != n:
                    raise BundleError(f"expected {n} potentials, got {len(pots)}", _pointer(base + ["potentials"]))
                out["potentials"] = tuple(_parse(chart, x, base + ["potentials", i]) for i, x in enumerate(pots))
            specs[kind] = out
        elif kind == "poisson_pair":
            out = {}
            for key in ("P1", "P2"):
                need(tensors, spec[key], base + [key], "tensor")
                out[key] = spec[key]
            for key in ("H1", "H2"):
                if key in spec:
                    need(scalars, spec[key], base + [key], "scalar")
                    out[key] = spec[key]
            if "length" in spec:
                out["length"] = spec["length"]
            specs[kind] = out
    return GeometryBundle(chart, tensors, forms, fields, scalars, spaces, specs, data.get("description", ""))


def loads_bundle(text: str) -> GeometryBundle:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BundleError(f"invalid JSON: {exc}") from None
    return bundle_from_dict(data)


def builtin_names() -> list:
    root = resources.files("haantjes") / "fixtures"
    return sorted(p.name[: -len(".json")] for p in root.iterdir() if p.name.endswith(".json"))


def load_bundle(path_or_name: str) -> GeometryBundle:
    """Load a bundle from a file path or a built-in fixture name."""
    path = Path(path_or_name)
    if path.is_file():
        return loads_bundle(path.read_text(encoding="utf-8"))
    if path_or_name in builtin_names():
        text = (resources.files("haantjes") / "fixtures" / f"{path_or_name}.json").read_text(encoding="utf-8")
        return loads_bundle(text)
    raise BundleError(f"no bundle file or built-in fixture named {path_or_name!r}")
