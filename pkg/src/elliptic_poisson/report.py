"""Check reports: one JSON object per check, plus a human-readable table.

The JSON serialization is deterministic (sorted keys, no timing fields) so
that re-running a suite with the same seed produces byte-identical output.
Durations are kept on the object for the table renderer only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

EXACT_ZERO = "exact-zero"


def _jsonable(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, complex):
        return repr(value)
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted(_jsonable(v) for v in value)
    return value


@dataclass
class Report:
    """Outcome of one verification or construction check."""

    check: str
    parameters: dict
    status: str  # "pass" | "fail"
    max_residual: float | str | None = None
    failures: list = field(default_factory=list)
    duration: float | None = None  # table display only, never serialized

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "parameters": _jsonable(self.parameters),
            "status": self.status,
            "max_residual": _jsonable(self.max_residual),
            "failures": _jsonable(self.failures),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def make_report(check: str, parameters: dict, failures: list,
                max_residual=None, duration: float | None = None) -> Report:
    status = "pass" if not failures else "fail"
    if max_residual is None and not failures:
        max_residual = EXACT_ZERO
    return Report(check=check, parameters=parameters, status=status,
                  max_residual=max_residual, failures=failures,
                  duration=duration)


def summary(reports: list[Report]) -> Report:
    failed = [r.check for r in reports if not r.passed]
    return Report(
        check="summary",
        parameters={"checks": len(reports)},
        status="pass" if not failed else "fail",
        max_residual=None,
        failures=[{"witness": name} for name in failed],
    )


def render_table(reports: list[Report]) -> str:
    rows = [("check", "status", "max_residual", "failures", "seconds")]
    for r in reports:
        res = r.max_residual
        if isinstance(res, float):
            res = f"{res:.3e}"
        rows.append((
            r.check,
            r.status.upper(),
            "-" if res is None else str(res),
            str(len(r.failures)),
            "-" if r.duration is None else f"{r.duration:.2f}",
        ))
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    lines = []
    for k, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
        if k == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)
