"""Exception types shared across the package."""

from __future__ import annotations

from dataclasses import dataclass


class StableGraphsError(Exception):
    """Base class for all errors raised by this package."""


class RankMismatchError(StableGraphsError, ValueError):
    """Two values over free commutative monoids of different rank were combined."""


class SizeCapError(StableGraphsError, RuntimeError):
    """An input exceeded a configured size bound (flag count, enumeration cap)."""


@dataclass(frozen=True)
class Violation:
    """A single violated validity condition, identified by a stable string id."""

    condition: str
    detail: str = ""

    def __str__(self) -> str:
        return f"{self.condition}: {self.detail}" if self.detail else self.condition


class ValidationError(StableGraphsError, ValueError):
    """Raised when a graph or morphism fails its structural conditions.

    Carries the list of violated condition ids so callers (and the CLI error
    payload) can report exactly which conditions failed.
    """

    def __init__(self, violations: list[Violation] | tuple[Violation, ...], message: str = ""):
        self.violations = tuple(violations)
        head = message or "validation failed"
        super().__init__(f"{head}: " + "; ".join(str(v) for v in self.violations))

    @property
    def conditions(self) -> tuple[str, ...]:
        return tuple(v.condition for v in self.violations)


def ensure_valid(violations: list[Violation], message: str = "") -> None:
    if violations:
        raise ValidationError(violations, message)
