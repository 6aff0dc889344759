"""Structured pass/fail evidence returned by the verifiers."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

from .exprcore import RationalFn

PASS = "pass"
FAIL = "fail"

# Published JSON schema of a serialized VerificationReport / ChainReport.
REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["overall", "checks"],
    "properties": {
        "overall": {"enum": [PASS, FAIL]},
        "verdict": {"type": "string"},
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "status"],
                "properties": {
                    "id": {"type": "string"},
                    "name": {"type": "string"},
                    "status": {"enum": [PASS, FAIL]},
                    "detail": {"type": "string"},
                    "witness": {
                        "type": "object",
                        "required": ["indices", "value"],
                        "properties": {
                            "indices": {"type": "array", "items": {"type": "integer"}},
                            "label": {"type": "string"},
                            "value": {
                                "oneOf": [
                                    {"type": "string"},
                                    {"type": "array", "items": {"type": "string"}},
                                ]
                            },
                        },
                    },
                    "failures": {"type": "integer", "minimum": 0},
                },
            },
        },
        "notes": {"type": "array", "items": {"type": "string"}},
        "hamiltonians": {"type": "array", "items": {"type": "string"}},
        "brackets": {"type": "array", "items": {"type": "array", "items": {"type": "string"}}},
    },
}


def _render(value) -> Any:
    if isinstance(value, RationalFn):
        return str(value)
    if isinstance(value, (tuple, list)):
        return [str(v) for v in value]
    return str(value)


@dataclass(frozen=True)
class Witness:
    """Where a check failed: 1-based indices and the offending value."""

    indices: tuple
    value: Any
    label: str = ""

    def to_dict(self):
        d = {"indices": list(self.indices), "value": _render(self.value)}
        if self.label:
            d["label"] = self.label
        return d


@dataclass
class Check:
    id: str
    status: str
    name: str = ""
    witness: Optional[Witness] = None
    detail: str = ""
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_dict(self):
        d = {"id": self.id, "status": self.status}
        if self.name:
            d["name"] = self.name
        if self.detail:
            d["detail"] = self.detail
        if self.witness is not None:
            d["witness"] = self.witness.to_dict()
        if self.failures:
            d["failures"] = len(self.failures)
        return d


def check_from_failures(id: str, name: str, failures: list, detail: str = "") -> Check:
    """A check that passes iff ``failures`` (a list of Witness) is empty."""
    if failures:
        return Check(id, FAIL, name, failures[0], detail, list(failures))
    return Check(id, PASS, name, None, detail)


@dataclass
class VerificationReport:
    checks: list
    verdict: Optional[str] = None
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def overall(self) -> str:
        return PASS if self.passed else FAIL

    def __getitem__(self, id: str) -> Check:
        for c in self.checks:
            if c.id == id:
                return c
        raise KeyError(id)

    def failed_ids(self) -> list:
        return [c.id for c in self.checks if not c.passed]

    def to_dict(self):
        d = {"overall": self.overall, "checks": [c.to_dict() for c in self.checks]}
        if self.verdict is not None:
            d["verdict"] = self.verdict
        if self.notes:
            d["notes"] = list(self.notes)
        return d

    def render(self) -> str:
        lines = []
        if self.verdict is not None:
            lines.append(f"verdict: {self.verdict}")
        for c in self.checks:
            label = f"{c.id} {c.name}".strip()
            line = f"[{c.status.upper()}] {label}"
            if c.detail:
                line += f" ({c.detail})"
            lines.append(line)
            if c.witness is not None:
                w = c.witness
                idx = ",".join(str(i) for i in w.indices)
                val = _render(w.value)
                val = "[" + ", ".join(val) + "]" if isinstance(val, list) else val
                label = f" {w.label}" if w.label else ""
                lines.append(f"    witness{label} at ({idx}): {val}")
        for n in self.notes:
            lines.append(f"note: {n}")
        lines.append(f"overall: {self.overall.upper()}")
        return "\n".join(lines)
