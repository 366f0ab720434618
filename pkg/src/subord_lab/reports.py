"""Result records shared by the certification and verification layers."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any

SCHEMA_VERSION = "1"


def _jsonable(value):
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "item"):  # numpy scalar
        return _jsonable(value.item())
    return value


@dataclass
class MarginReport:
    """
    Worst signed margin of an inequality over a sample grid.

    ``argmin`` names the sample that attains ``worst_margin`` (for checks whose
    bad direction is a maximum it is still the extremal sample).  ``samples``
    counts every grid point evaluated, ``skipped`` the ones where the
    inequality was undefined.
    """

    worst_margin: float
    argmin: dict[str, Any]
    samples: int
    skipped: int = 0
    passed: bool | None = None
    theorem: str | None = None
    b: float | None = None
    alpha: float | None = None
    details: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        d = {"schema": SCHEMA_VERSION}
        d.update(asdict(self))
        return _jsonable(d)
