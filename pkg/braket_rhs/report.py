"""Check results shared by every verification routine."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable


class Status(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    ERROR = "error"


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one check.

    status is PASS iff residual <= tolerance; ERROR reports carry no residual.
    """
    name: str
    status: Status
    residual: float | None
    tolerance: float
    detail: str = ""

    @classmethod
    def compare(cls, name: str, residual: float, tolerance: float, detail: str = "") -> CheckReport:
        residual = float(residual)
        ok = not math.isnan(residual) and residual <= tolerance
        return cls(name, Status.PASS if ok else Status.FAIL, residual, float(tolerance), detail)

    @classmethod
    def error(cls, name: str, tolerance: float, detail: str) -> CheckReport:
        return cls(name, Status.ERROR, None, float(tolerance), detail)

    @property
    def passed(self) -> bool:
        return self.status is Status.PASS


def max_residual(values: Iterable[float]) -> float:
    """Largest value, 0.0 for an empty iterable."""
    return max((float(v) for v in values), default=0.0)


def combine(name: str, reports: Iterable[CheckReport], tolerance: float) -> CheckReport:
    """Fold several reports into one carrying the worst residual."""
    reports = list(reports)
    errors = [r for r in reports if r.status is Status.ERROR]
    if errors:
        return CheckReport.error(name, tolerance, "; ".join(f"{r.name}: {r.detail}" for r in errors))
    worst = max(reports, key=lambda r: r.residual or 0.0, default=None)
    if worst is None:
        return CheckReport.compare(name, 0.0, tolerance, "no sub-checks")
    return CheckReport.compare(
        name, worst.residual or 0.0, tolerance,
        f"{len(reports)} sub-checks, worst: {worst.name}",
    )
