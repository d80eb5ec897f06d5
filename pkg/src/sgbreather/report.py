"""Structured pass/fail records and deterministic report serialization.

Every numeric in a report carries the tolerance it was tested against, so a
report is self-contained evidence.  Serialization is canonical: sorted keys,
repr-shortest floats, LF endings; identical inputs give identical bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field


def _jsonable(x):
    if isinstance(x, complex):
        return {"re": repr(x.real), "im": repr(x.imag)}
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    return x


@dataclass
class Check:
    """One verified quantity: residual `value` tested against `tol`."""

    name: str
    value: float
    tol: float
    passed: bool | None = None
    detail: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.passed is None:
            self.passed = bool(self.value <= self.tol)

    def as_dict(self) -> dict:
        d = {"name": self.name, "value": _jsonable(float(self.value)),
             "tol": _jsonable(float(self.tol)), "pass": bool(self.passed)}
        if self.detail:
            d["detail"] = _jsonable(self.detail)
        return d


@dataclass
class VerificationReport:
    """Named collection of checks; passes iff every check passes."""

    name: str
    checks: list[Check] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def add(self, check: Check) -> None:
        self.checks.append(check)

    def extend(self, other: "VerificationReport", prefix: str = "") -> None:
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.value, c.tol, c.passed, c.detail))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def max_residual(self) -> float:
        return max((c.value for c in self.checks), default=0.0)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def as_dict(self) -> dict:
        return {"name": self.name, "pass": self.passed,
                "meta": _jsonable(self.meta),
                "checks": [c.as_dict() for c in self.checks]}

    def __str__(self) -> str:
        lines = [f"[{'PASS' if self.passed else 'FAIL'}] {self.name}"]
        for c in self.checks:
            mark = "ok " if c.passed else "FAIL"
            lines.append(f"  {mark} {c.name}: {c.value:.3e} (tol {c.tol:.1e})")
        return "\n".join(lines)


def dump_json(obj: dict, path) -> None:
    """Canonical JSON: sorted keys, LF endings, no trailing whitespace."""
    text = json.dumps(obj, sort_keys=True, indent=1, ensure_ascii=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(text + "\n")


def dump_csv(rows: list[dict], header: list[str], path) -> None:
    """Fixed-schema CSV, UTF-8, LF endings."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(str(row[h]) for h in header))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
