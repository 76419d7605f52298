"""Exception types and the check verdict shared by all modules."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


class HexcellError(Exception):
    """Base class for all library errors."""


class UsageError(HexcellError, ValueError):
    """Bad arguments: dimension mismatch, out-of-range index, wrong shape."""


class ValidationError(HexcellError):
    """An input object does not have the properties an operation requires."""


class StructuralError(HexcellError):
    """A constructed object violates a structural property it must have."""

    def __init__(self, message: str, witness: dict | None = None):
        super().__init__(message)
        self.witness = witness


class ConditionViolation(HexcellError):
    """A graph fails the common-neighbour condition (gamma, delta)."""

    def __init__(self, message: str, pair: tuple[int, int]):
        super().__init__(message)
        self.pair = pair


class ExpansionError(HexcellError):
    """Distance-distribution expansion hit an inconsistent value."""

    def __init__(self, message: str, identity: str):
        super().__init__(message)
        self.identity = identity


@dataclass(frozen=True)
class Verdict:
    """Outcome of an exhaustive check.

    Truthy iff the check passed. ``witness`` is a JSON-ready dict describing
    the least failing object in the check's fixed global order.
    """

    ok: bool
    witness: dict | None = None
    detail: str = ""
    extra: dict[str, Any] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"ok": self.ok}
        if self.detail:
            out["detail"] = self.detail
        if self.witness is not None:
            out["witness"] = self.witness
        out.update(self.extra)
        return out
