from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one named check.

    ``witness`` carries an exact counterexample (index tuple, point,
    nonzero polynomial, ...) and is present exactly when the check failed.
    Skipped checks count as neither pass nor fail when reports are merged.
    """

    name: str
    passed: bool
    witness: Mapping[str, Any] | None = None
    skipped: bool = False
    detail: str | None = None
    parts: tuple[CheckReport, ...] = field(default=())

    def __post_init__(self):
        if self.skipped:
            if self.witness is not None:
                raise ValueError("skipped checks carry no witness")
        elif self.passed != (self.witness is None):
            raise ValueError(f"{self.name}: witness must be present iff the check failed")

    def __bool__(self) -> bool:
        return self.passed

    def part(self, name: str) -> CheckReport:
        for p in self.parts:
            if p.name == name:
                return p
        raise KeyError(name)

    def failed_parts(self) -> list[str]:
        return [p.name for p in self.parts if not p.skipped and not p.passed]


def ok(name: str, detail: str | None = None) -> CheckReport:
    return CheckReport(name, True, detail=detail)


def fail(name: str, detail: str | None = None, **witness) -> CheckReport:
    return CheckReport(name, False, witness=witness, detail=detail)


def skipped(name: str, reason: str) -> CheckReport:
    return CheckReport(name, True, skipped=True, detail=reason)


def combine(name: str, parts: Iterable[CheckReport], detail: str | None = None) -> CheckReport:
    """Merge sub-checks; the first failing part supplies the witness."""
    parts = tuple(parts)
    for p in parts:
        if not p.skipped and not p.passed:
            witness = {"check": p.name}
            witness.update(p.witness or {})
            return CheckReport(name, False, witness=witness, detail=detail, parts=parts)
    return CheckReport(name, True, detail=detail, parts=parts)
