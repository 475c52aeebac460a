"""Structured outcome of a single identity or inequality verification."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

FIELDS = ("name", "params", "measured", "bound", "ratio", "pass", "tolerance", "notes")


@dataclass
class CheckReport:
    """Result of a named check.

    ``kind`` selects the pass rule:

    * ``"inequality"``: ``measured <= bound * (1 + tolerance)``
    * ``"identity"``: ``|measured - bound| <= tolerance * max(1, |bound|)``
    * ``"lower_bound"``: ``measured >= bound - tolerance``
    * ``"envelope"``: ``params["envelope"] = (lo, hi)`` contains ``measured``
      up to the relative tolerance
    """

    name: str
    params: dict[str, Any]
    measured: float
    bound: float
    tolerance: float
    kind: str = "inequality"
    notes: str = ""
    passed: bool = field(init=False)

    def __post_init__(self):
        self.measured = float(self.measured)
        self.bound = float(self.bound)
        self.passed = self.evaluate()

    def evaluate(self) -> bool:
        m, b, tol = self.measured, self.bound, self.tolerance
        if math.isnan(m) or math.isnan(b):
            return False
        if self.kind == "identity":
            return abs(m - b) <= tol * max(1.0, abs(b))
        if self.kind == "inequality":
            return m <= b * (1.0 + tol) if b >= 0 else m <= b * (1.0 - tol)
        if self.kind == "lower_bound":
            return m >= b - tol
        if self.kind == "envelope":
            lo, hi = self.params["envelope"]
            return lo * (1.0 - tol) <= m <= hi * (1.0 + tol)
        raise ValueError(f"unknown check kind {self.kind!r}")

    @property
    def ratio(self) -> float:
        if self.bound == 0.0:
            return 0.0 if self.measured == 0.0 else math.inf
        return self.measured / self.bound

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "params": _jsonable(self.params),
            "measured": _jsonable(self.measured),
            "bound": _jsonable(self.bound),
            "ratio": _jsonable(self.ratio),
            "pass": self.passed,
            "tolerance": self.tolerance,
            "notes": self.notes,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=False)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"[{status}] {self.name}: measured={self.measured:.6g} "
                f"bound={self.bound:.6g} ratio={self.ratio:.4g} tol={self.tolerance:g}")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if hasattr(obj, "item"):
        return _jsonable(obj.item())
    if isinstance(obj, float) and not math.isfinite(obj):
        return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    return obj
