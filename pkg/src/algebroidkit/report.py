"""Verification reports: named identity checks with polynomial witnesses."""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from typing import Any

from .ring import Poly

PASS = "pass"
FAIL = "fail"
ERROR = "error"


@dataclass(frozen=True)
class Witness:
    """A nonzero residual showing an identity fails, plus the inputs producing it."""

    residual: Poly
    inputs: Mapping[str, Any] = field(default_factory=dict)
    detail: str | None = None

    def __post_init__(self) -> None:
        if self.residual.is_zero():
            raise ValueError("a witness residual must be nonzero")

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "residual": str(self.residual),
            "variables": list(self.residual.variables),
            "inputs": {k: _plain(v) for k, v in self.inputs.items()},
        }
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    witness: Witness | None = None

    def __post_init__(self) -> None:
        if not self.passed and self.witness is None:
            raise ValueError(f"failed check {self.name!r} needs a witness")

    @property
    def status(self) -> str:
        return PASS if self.passed else FAIL

    def describe(self) -> str:
        if self.passed:
            return f"{self.name}: pass"
        w = self.witness
        assert w is not None
        inputs = ", ".join(f"{k}={_plain(v)}" for k, v in w.inputs.items())
        text = f"{self.name}: fail, residual {w.residual}"
        if inputs:
            text += f" [{inputs}]"
        if w.detail:
            text += f" ({w.detail})"
        return text

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"name": self.name, "status": self.status}
        if self.witness is not None:
            out["witness"] = self.witness.to_dict()
        return out


@dataclass(frozen=True)
class Report:
    subject: str
    checks: tuple[Check, ...] = ()
    status_override: str | None = None
    message: str | None = None
    data: Mapping[str, Any] = field(default_factory=dict)

    @property
    def status(self) -> str:
        if self.status_override:
            return self.status_override
        return PASS if all(c.passed for c in self.checks) else FAIL

    @property
    def ok(self) -> bool:
        return self.status == PASS

    def first_failure(self) -> Check | None:
        for c in self.checks:
            if not c.passed:
                return c
        return None

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def merged(self, other: Report, subject: str | None = None) -> Report:
        data = dict(self.data)
        data.update(other.data)
        return Report(subject or self.subject, self.checks + other.checks, data=data)

    def with_data(self, **data: Any) -> Report:
        merged = dict(self.data)
        merged.update(data)
        return Report(self.subject, self.checks, self.status_override, self.message, merged)

    @classmethod
    def error(cls, subject: str, message: str) -> Report:
        return cls(subject, (), ERROR, message)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "status": self.status,
            "subject": self.subject,
            "checks": [c.to_dict() for c in self.checks],
        }
        if self.message:
            out["message"] = self.message
        if self.data:
            out["data"] = {k: _plain(v) for k, v in self.data.items()}
        return out

    def render(self) -> str:
        lines = [f"{self.subject}: {self.status.upper()}"]
        if self.message:
            lines.append(f"  {self.message}")
        for c in self.checks:
            lines.append("  " + c.describe())
        return "\n".join(lines)


class ReportBuilder:
    """Accumulates checks; optionally stops recording after the first failure."""

    def __init__(self, subject: str, stop_at_first: bool = False):
        self.subject = subject
        self.stop_at_first = stop_at_first
        self.checks: list[Check] = []

    @property
    def done(self) -> bool:
        return self.stop_at_first and any(not c.passed for c in self.checks)

    def zero(self, name: str, residual: Poly, **inputs: Any) -> bool:
        """Record that ``residual`` must vanish. Returns whether it did."""
        if self.done:
            return residual.is_zero()
        if residual.is_zero():
            self.checks.append(Check(name, True))
            return True
        self.checks.append(Check(name, False, Witness(residual, inputs)))
        return False

    def zeros(self, name: str, residuals: Iterable[Poly], detail_fn: Any = None, **inputs: Any) -> bool:
        """Like :meth:`zero` for a family; the first nonzero member is the witness."""
        for k, r in enumerate(residuals):
            if not r.is_zero():
                if not self.done:
                    detail = detail_fn(k) if detail_fn else f"component {k}"
                    self.checks.append(Check(name, False, Witness(r, inputs, detail)))
                return False
        if not self.done:
            self.checks.append(Check(name, True))
        return True

    def add(self, check: Check) -> None:
        if not self.done:
            self.checks.append(check)

    def report(self, **data: Any) -> Report:
        return Report(self.subject, tuple(self.checks), data=data)


def matrix_residuals(m: Any) -> list[Poly]:
    return [e for row in m.entries for e in row]


def _plain(value: Any) -> Any:
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, Mapping):
        return {str(k): _plain(v) for k, v in value.items()}
    return str(value)
