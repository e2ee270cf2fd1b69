"""Extended nonnegative values: finite floats plus explicit Infinite/Unknown markers.

Norms, sums and counts in this package may legitimately be infinite.  They are
never encoded as ``float('inf')``; instead an :class:`Infinite` carrying the
reason is returned, and :class:`Unknown` is used when neither finiteness nor
divergence could be certified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Union


@dataclass(frozen=True)
class Infinite:
    """A certified +infinity together with the reason it was certified."""

    reason: str = ""

    def __repr__(self) -> str:
        return f"Infinite({self.reason!r})"


@dataclass(frozen=True)
class Unknown:
    """Finiteness could not be decided; ``partial`` is the best lower estimate."""

    reason: str = ""
    partial: float = 0.0


Value = Union[float, Infinite, Unknown]


def is_finite(v: Value) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def is_infinite(v: Value) -> bool:
    return isinstance(v, Infinite)


def vsum(values: Iterable[Value]) -> Value:
    """Sum of nonnegative extended values; Infinite dominates Unknown."""
    total = 0.0
    unknown = None
    for v in values:
        if isinstance(v, Infinite):
            return v
        if isinstance(v, Unknown):
            unknown = v if unknown is None else unknown
            total += v.partial
        else:
            total += float(v)
    if unknown is not None:
        return Unknown(unknown.reason, total)
    return total


def vscale(c: float, v: Value) -> Value:
    if isinstance(v, Infinite):
        return v if c > 0 else 0.0
    if isinstance(v, Unknown):
        return Unknown(v.reason, c * v.partial)
    return c * float(v)


def status(v: Value) -> str:
    if isinstance(v, Infinite):
        return "infinite"
    if isinstance(v, Unknown):
        return "unknown"
    return "finite"


def to_json(v: Value, digits: int = 12):
    """JSON-safe rendering; infinities become the string ``"inf"``."""
    if isinstance(v, Infinite):
        return {"value": "inf", "reason": v.reason}
    if isinstance(v, Unknown):
        return {"value": "unknown", "reason": v.reason, "partial": fmt(v.partial, digits)}
    return {"value": fmt(float(v), digits)}


def fmt(x: float, digits: int = 12):
    """Fixed-precision float for deterministic output."""
    if x == 0:
        return 0.0
    return float(f"{x:.{digits}g}")
