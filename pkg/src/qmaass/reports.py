"""Structured pass/fail reports shared by every verification routine.

A check produces a :class:`CheckReport`: the check's name, the exact
parameters it ran with, a ``pass``/``fail`` status, and a detail map.  For
series comparisons the detail map pinpoints the first mismatching exponent
together with both coefficients, so a failing run is immediately actionable.
Reports serialize to single JSON objects (one line per check on the CLI).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .series import QSeries

__all__ = [
    "CheckReport",
    "report_from_comparison",
    "report_from_condition",
]


def _jsonable(value):
    """Render exact values as strings, containers recursively."""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (bool, int, float, str)) or value is None:
        return value
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    to_dict = getattr(value, "to_json_dict", None)
    if callable(to_dict):
        return to_dict()
    return str(value)


def _exact_str(value):
    """Exact scalars as strings (uniform type for JSON consumers)."""
    if isinstance(value, (int, Fraction)):
        return str(value)
    return _jsonable(value)


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one verification check."""

    check: str
    params: dict
    status: str  # "pass" or "fail"
    details: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.status not in ("pass", "fail"):
            raise ValueError(f"status must be 'pass' or 'fail', got {self.status!r}")

    @property
    def ok(self) -> bool:
        return self.status == "pass"

    def to_json_dict(self) -> dict:
        out = {
            "check": self.check,
            "params": _jsonable(self.params),
            "status": self.status,
        }
        for key, value in self.details.items():
            out[key] = _jsonable(value)
        return out


def report_from_comparison(
    check: str,
    params: dict,
    lhs: QSeries,
    rhs: QSeries,
    up_to=None,
) -> CheckReport:
    """Coefficient-exact comparison below ``up_to`` (and both truncations)."""
    bad = lhs.first_mismatch(rhs, up_to)
    if bad is None:
        return CheckReport(check, dict(params), "pass")
    return CheckReport(
        check,
        dict(params),
        "fail",
        {
            "first_mismatch_exponent": _exact_str(bad),
            "lhs_coeff": _exact_str(lhs.coeff(bad)),
            "rhs_coeff": _exact_str(rhs.coeff(bad)),
        },
    )


def report_from_condition(
    check: str,
    params: dict,
    holds: bool,
    details: dict | None = None,
) -> CheckReport:
    """Boolean check; ``details`` are attached either way."""
    return CheckReport(check, dict(params), "pass" if holds else "fail", dict(details or {}))
