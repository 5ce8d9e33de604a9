"""Structured pass/fail reports shared by every checker."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .grading import CompletionElement, Vector
from .scalar import Gauss, fmt, is_scalar

REPORT_VERSION = 1


def render_value(x):
    """JSON-friendly rendering of scalars, vectors, monomials and containers."""
    if x is None or isinstance(x, (bool, str)):
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, Gauss) or is_scalar(x):
        return fmt(x)
    if isinstance(x, (Vector, CompletionElement)):
        return str(x)
    if isinstance(x, dict):
        return {str(k): render_value(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [render_value(v) for v in x]
    return str(x)


@dataclass
class CheckResult:
    name: str
    status: str  # "pass" | "fail" | "skip"
    detail: str = ""
    witness: dict | None = None
    coverage: dict | None = None

    def __post_init__(self):
        if self.status == "fail" and self.witness is None:
            raise ValueError(f"failing check {self.name} needs a witness")


@dataclass
class CheckReport:
    results: list = field(default_factory=list)

    def add(self, name, ok: bool, detail="", witness=None, coverage=None):
        self.results.append(CheckResult(name, "pass" if ok else "fail", detail,
                                        None if ok else (witness or {"detail": detail}), coverage))
        return ok

    def skip(self, name, detail=""):
        self.results.append(CheckResult(name, "skip", detail))

    def extend(self, other: "CheckReport", prefix: str = ""):
        for r in other.results:
            self.results.append(CheckResult(prefix + r.name, r.status, r.detail, r.witness, r.coverage))
        return self

    @property
    def passed(self) -> bool:
        return all(r.status != "fail" for r in self.results)

    def status_of(self, name: str) -> str:
        matches = [r.status for r in self.results if r.name == name]
        if not matches:
            raise KeyError(name)
        return "fail" if "fail" in matches else matches[0]

    def failures(self):
        return [r for r in self.results if r.status == "fail"]

    def to_dict(self) -> dict:
        ordered = sorted(self.results, key=lambda r: r.name)
        return {
            "version": REPORT_VERSION,
            "passed": self.passed,
            "checks": [
                {"name": r.name, "status": r.status, "detail": r.detail,
                 **({"coverage": render_value(r.coverage)} if r.coverage else {})}
                for r in ordered
            ],
            "witnesses": [
                {"check": r.name, **render_value(r.witness)} for r in ordered if r.witness is not None
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def render_text(self) -> str:
        lines = []
        for r in sorted(self.results, key=lambda r: r.name):
            line = f"[{r.status.upper():4}] {r.name}"
            if r.detail:
                line += f": {r.detail}"
            lines.append(line)
            if r.witness is not None:
                lines.append(f"       witness: {json.dumps(render_value(r.witness), sort_keys=True)}")
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)
