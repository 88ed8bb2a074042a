"""Structured pass/fail reports used by all validators."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    witness: str = ""


@dataclass
class ValidationReport:
    label: str
    checks: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def add(self, name: str, passed: bool, witness: str = ""):
        self.checks.append(CheckResult(name, bool(passed), witness))

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def as_dict(self):
        return {
            "label": self.label,
            "ok": self.ok,
            "checks": [
                {"name": c.name, "passed": c.passed, **({"witness": c.witness} if c.witness else {})}
                for c in self.checks
            ],
            **({"data": self.data} if self.data else {}),
        }
