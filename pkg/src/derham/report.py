"""Schema-stable check reports shared by the verifiers and the CLI."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

__all__ = ["CheckItem", "Report", "jsonable"]


def jsonable(value: Any):
    """Lossless JSON encoding: Fractions become 'p/q' strings."""
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, bool) or value is None or isinstance(value, (int, float, str)):
        return value
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    return str(value)


@dataclass
class CheckItem:
    name: str
    expected: Any
    computed: Any
    passed: bool
    backend: str = "exact"

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "expected": jsonable(self.expected),
            "computed": jsonable(self.computed),
            "passed": self.passed,
            "backend": self.backend,
        }

    def format_text(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.name}: expected={jsonable(self.expected)} computed={jsonable(self.computed)}"


@dataclass
class Report:
    title: str
    params: dict = field(default_factory=dict)
    checks: list[CheckItem] = field(default_factory=list)
    witnesses: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    started: float = field(default_factory=time.perf_counter)
    wall_ms: float = 0.0

    def check(self, name: str, expected, computed, passed: bool | None = None,
              backend: str = "exact") -> CheckItem:
        if passed is None:
            passed = expected == computed
        item = CheckItem(name, expected, computed, passed, backend)
        self.checks.append(item)
        return item

    def finish(self) -> "Report":
        self.wall_ms = (time.perf_counter() - self.started) * 1000.0
        return self

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "schema": 1,
            "title": self.title,
            "params": jsonable(self.params),
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "witnesses": jsonable(self.witnesses),
            "notes": list(self.notes),
            "wall_ms": round(self.wall_ms, 3),
        }

    def format_text(self) -> str:
        head = f"== {self.title} {self.params if self.params else ''}".rstrip()
        lines = [head]
        lines += ["  " + c.format_text() for c in self.checks]
        for note in self.notes:
            lines.append(f"  note: {note}")
        lines.append(f"  -> {'PASS' if self.passed else 'FAIL'} ({self.wall_ms:.0f} ms)")
        return "\n".join(lines)
