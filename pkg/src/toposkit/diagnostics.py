"""Shared report types for law checks.

Validators in this package never raise on a broken law; they return a
``Report`` listing every violation with a witness, so callers can show
all failures at once.  Constructors still raise on structural nonsense
(unknown names, missing table entries), which no report can describe.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class Violation:
    kind: str
    witness: tuple[Any, ...]
    message: str

    def __str__(self) -> str:
        return f"[{self.kind}] {self.message}"


@dataclass
class Report:
    violations: list[Violation] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def add(self, kind: str, witness: tuple[Any, ...], message: str) -> None:
        self.violations.append(Violation(kind, witness, message))

    def of_kind(self, kind: str) -> list[Violation]:
        return [v for v in self.violations if v.kind == kind]

    def merge(self, other: "Report") -> None:
        self.violations.extend(other.violations)
        self.notes.extend(other.notes)

    def summary(self) -> str:
        if self.ok:
            return "ok"
        return "; ".join(str(v) for v in self.violations)


class ToposkitError(Exception):
    """Base class for errors raised by this package."""


class StructureError(ToposkitError):
    """A value could not even be constructed (names missing, shapes wrong)."""


class BoundExceeded(ToposkitError):
    """An enumeration grew past its configured cap."""


class OperationCancelled(ToposkitError):
    """Raised by long-running operations when the caller's token is set."""
