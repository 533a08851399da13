"""Verdict records returned by every check in the library."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any


class Verdict(str, enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    VACUOUS = "vacuous"
    INCONCLUSIVE = "inconclusive"
    NOT_FIXED = "not_fixed"


@dataclass(frozen=True)
class CheckReport:
    """Outcome of a sampled "for all" claim.

    ``witness`` holds the first violating tuple (in deterministic order) when the
    check fails; ``counts`` tallies per-status outcomes where that makes sense.
    """

    check: str
    verdict: Verdict
    witness: dict[str, Any] | None = None
    counts: dict[str, int] = field(default_factory=dict)
    details: dict[str, Any] = field(default_factory=dict)
    message: str = ""

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.PASS

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict[str, Any]:
        return to_jsonable(
            {
                "check": self.check,
                "verdict": self.verdict.value,
                "witness": self.witness,
                "counts": self.counts,
                "details": self.details,
                "message": self.message,
            }
        )


def to_jsonable(obj: Any) -> Any:
    """Convert nested report data into plain JSON types, deterministically."""
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        if math.isnan(obj) or math.isinf(obj):
            return repr(obj)
        return obj
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    if hasattr(obj, "__float__"):
        return float(obj)
    return str(obj)


def dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True) + "\n"
