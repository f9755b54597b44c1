"""Check results and their text/JSON rendering."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

PASS, FAIL, SKIP = "PASS", "FAIL", "SKIP"


def format_witness(w) -> str:
    if isinstance(w, (frozenset, set)):
        return "{" + ",".join(format_witness(x) for x in sorted(w)) + "}"
    if isinstance(w, (tuple, list)):
        return "(" + ",".join(format_witness(x) for x in w) + ")"
    if isinstance(w, dict):
        return "[" + ";".join(f"{k}={format_witness(v)}" for k, v in w.items()) + "]"
    return str(w).replace(" ", "_")


@dataclass
class Check:
    id: str
    status: str
    witness: object = None
    bound: object = None
    note: str = ""

    def line(self) -> str:
        parts = ["LEMMA", self.id, self.status]
        if self.witness is not None:
            parts.append("witness=" + format_witness(self.witness))
        if self.bound is not None:
            parts.append(f"bound={self.bound}")
        if self.note:
            parts.append("note=" + self.note.replace(" ", "_"))
        return " ".join(parts)

    def as_dict(self) -> dict:
        return {
            "id": self.id,
            "status": self.status,
            "witness": None if self.witness is None else format_witness(self.witness),
            "bound": self.bound,
            "note": self.note or None,
        }


@dataclass
class Report:
    title: str = ""
    checks: list[Check] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def add(self, id: str, ok: bool, witness=None, bound=None, note: str = "") -> bool:
        if ok:
            self.checks.append(Check(id, PASS, None, bound, note))
        else:
            if witness is None:
                witness = "none-recorded"
            self.checks.append(Check(id, FAIL, witness, bound, note))
        return ok

    def fail(self, id: str, witness, bound=None, note: str = "") -> bool:
        return self.add(id, False, witness, bound, note)

    def skip(self, id: str, note: str = "hypothesis-not-met") -> None:
        self.checks.append(Check(id, SKIP, None, None, note))

    def extend(self, other: "Report", prefix: str = "") -> "Report":
        for c in other.checks:
            self.checks.append(Check(prefix + c.id, c.status, c.witness, c.bound, c.note))
        return self

    @property
    def ok(self) -> bool:
        return all(c.status != FAIL for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if c.status == FAIL]

    def status_of(self, id: str) -> str | None:
        for c in self.checks:
            if c.id == id:
                return c.status
        return None

    def text(self) -> str:
        out = []
        if self.title:
            out.append(f"# {self.title}")
        for k in sorted(self.meta):
            out.append(f"# {k}: {self.meta[k]}")
        out.extend(c.line() for c in self.checks)
        return "\n".join(out)

    def as_dict(self) -> dict:
        return {"title": self.title, "meta": dict(sorted(self.meta.items())),
                "checks": [c.as_dict() for c in self.checks]}

    def json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=False)

    def __str__(self):
        return self.text()


class HypothesisError(ValueError):
    """A conditional construction was asked for where its hypothesis fails."""

    def __init__(self, clause: str, witness=None, report: Report | None = None):
        super().__init__(f"hypothesis not met: {clause}"
                         + ("" if witness is None else f" (witness {format_witness(witness)})"))
        self.clause = clause
        self.witness = witness
        self.report = report
