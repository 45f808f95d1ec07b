"""Check records shared by the verification suites."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class Check:
    check_id: str
    ref: str
    passed: bool
    lhs: str = ""
    rhs: str = ""
    params: dict[str, Any] = field(default_factory=dict)

    def as_json(self, suite: str) -> dict[str, Any]:
        return {
            "suite": suite,
            "check_id": self.check_id,
            "paper_ref": self.ref,
            "pass": self.passed,
            "lhs": self.lhs,
            "rhs": self.rhs,
        }

    def as_chart_json(self) -> dict[str, Any]:
        return {
            "check": self.check_id,
            "params": self.params,
            "pass": self.passed,
            "lhs": self.lhs,
            "rhs": self.rhs,
        }


def compare(check_id: str, ref: str, lhs: Any, rhs: Any, **params: Any) -> Check:
    ok = lhs == rhs
    return Check(check_id, ref, ok, str(lhs), str(rhs), params)


def all_pass(checks: list[Check]) -> bool:
    return all(c.passed for c in checks)


def failures(checks: list[Check]) -> list[Check]:
    return [c for c in checks if not c.passed]
