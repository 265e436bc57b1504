"""Verdict records shared by the checker and the command line."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

ZERO = "zero"
NONZERO = "nonzero"


@dataclass
class CheckResult:
    """Outcome of one identity check.

    ``witness`` is ``(indices, entry)`` for the first nonzero entry of the
    difference; ``value`` keeps the full difference for callers that want to
    inspect it further and is not serialized.
    """

    id: str
    status: str
    witness: Optional[Tuple[Any, Any]] = None
    notes: Dict[str, Any] = field(default_factory=dict)
    value: Any = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if (self.status == ZERO) != (self.witness is None):
            raise ValueError("status zero must come without a witness and vice versa")

    @property
    def ok(self) -> bool:
        return self.status == ZERO

    def to_json(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"id": self.id, "status": self.status, "witness": None}
        if self.witness is not None:
            idx, entry = self.witness
            out["witness"] = {"indices": _jsonable(idx), "entry": str(entry)}
        if self.notes:
            out["notes"] = {k: str(v) for k, v in self.notes.items()}
        return out


def _jsonable(idx):
    if isinstance(idx, tuple):
        return [_jsonable(i) for i in idx]
    return idx


def result_from(id: str, difference, notes: Optional[Dict[str, Any]] = None) -> CheckResult:
    """Build a CheckResult from anything with a ``first_nonzero`` method or a
    scalar-like value that is falsy when zero."""
    if hasattr(difference, "first_nonzero"):
        w = difference.first_nonzero()
    else:
        w = None if not difference else ((), difference)
    return CheckResult(id, ZERO if w is None else NONZERO, w, dict(notes or {}), difference)


@dataclass
class EvaluationData:
    g: Any = None
    h: Any = None
    a: Any = None
    m2: Any = None
    alpha: Any = None
    c26: Any = None
    c28: Any = None
    c13: Any = None

    def to_json(self) -> Dict[str, Optional[str]]:
        keys = ("g", "h", "m2", "c26", "c28", "alpha")
        return {k: (None if getattr(self, k) is None else str(getattr(self, k))) for k in keys}


@dataclass
class ConstraintReport:
    results: List[CheckResult] = field(default_factory=list)
    centrals: EvaluationData = field(default_factory=EvaluationData)
    flags: List[str] = field(default_factory=list)

    def add(self, result: CheckResult) -> CheckResult:
        self.results.append(result)
        return result

    def extend(self, other: "ConstraintReport") -> None:
        self.results.extend(other.results)
        self.flags.extend(other.flags)

    def by_id(self, id: str) -> CheckResult:
        for r in self.results:
            if r.id == id:
                return r
        raise KeyError(id)

    def __contains__(self, id: str) -> bool:
        return any(r.id == id for r in self.results)

    @property
    def all_zero(self) -> bool:
        return all(r.ok for r in self.results)

    def nonzero_ids(self) -> List[str]:
        return [r.id for r in self.results if not r.ok]
