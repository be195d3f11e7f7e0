"""Output formatting: JSON lines and plain text.

JSON lines are assembled by hand so key order is fixed and every float is
printed with 17 significant digits; identical runs give byte-identical output.
"""
from __future__ import annotations

import json
import math
from typing import Any, Iterable

from .evaluator import Value, describe, type_name
from .report import CheckReport
from .spectral import SpectralDecomposition


def _number(x: float | None) -> str:
    if x is None:
        return "null"
    x = float(x)
    if not math.isfinite(x):
        return json.dumps(str(x))
    return f"{x + 0.0:.17g}"


def _string(s: str) -> str:
    return json.dumps(s, ensure_ascii=False)


def _complex(z: complex) -> str:
    return f"[{_number(z.real)}, {_number(z.imag)}]"


def _object(fields: Iterable[tuple[str, str]]) -> str:
    """Join pre-rendered values into a one-line JSON object, keeping field order."""
    return "{" + ", ".join(f"{_string(k)}: {v}" for k, v in fields) + "}"


def format_report_json(report: CheckReport) -> str:
    return _object([
        ("name", _string(report.name)),
        ("status", _string(report.status.value)),
        ("residual", _number(report.residual)),
        ("tolerance", _number(report.tolerance)),
        ("detail", _string(report.detail)),
    ])


def format_report_text(report: CheckReport) -> str:
    residual = "-" if report.residual is None else f"{report.residual:.3e}"
    line = f"{report.status.value.upper():<5}  {report.name:<44}  residual={residual}  tol={report.tolerance:.1e}"
    if report.detail:
        line += f"  ({report.detail})"
    return line


def format_reports(reports: Iterable[CheckReport], fmt: str = "json") -> str:
    render = format_report_json if fmt == "json" else format_report_text
    return "".join(render(r) + "\n" for r in reports)


def format_summary(reports: list[CheckReport]) -> str:
    passed = sum(r.passed for r in reports)
    return f"{passed}/{len(reports)} checks passed"


def format_spectral(sd: SpectralDecomposition, fmt: str = "json") -> str:
    """One line per generalized eigenpair, in decomposition order."""
    lines = []
    for index, pair in enumerate(sd.pairs):
        if fmt == "json":
            lines.append(_object([
                ("index", str(index)),
                ("lambdas", "[" + ", ".join(_number(x) for x in pair.lambdas) + "]"),
                ("mult_indices", "[" + ", ".join(str(k) for k in pair.mult_indices) + "]"),
                ("lambda_sum", _number(pair.lambda_sum)),
                ("coords", "[" + ", ".join(_complex(complex(c)) for c in pair.rep.dense) + "]"),
            ]))
        else:
            labels = ", ".join(f"{lam:g}#{k}" for lam, k in zip(pair.lambdas, pair.mult_indices))
            lines.append(f"{index:>3}  sum={pair.lambda_sum:+.6g}  labels=({labels})")
    return "".join(line + "\n" for line in lines)


def format_value(expr: str, value: Value, tol: float, fmt: str = "json") -> str:
    if fmt != "json":
        return describe(value, tol) + "\n"
    fields: list[tuple[str, Any]] = [("expr", _string(expr)), ("type", _string(type_name(value)))]
    if isinstance(value, complex):
        fields.append(("value", _complex(value)))
    fields.append(("text", _string(describe(value, tol))))
    return _object(fields) + "\n"


def format_error(kind: str, message: str, span: tuple[int, int] | None = None) -> str:
    fields = [("error", _string(kind)), ("message", _string(message))]
    if span is not None:
        fields.append(("span", f"[{span[0]}, {span[1]}]"))
    return _object(fields) + "\n"
