"""Search result containers shared by the extremal and Ramsey modules."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any

from .space import PointSet


@dataclass
class SearchReport:
    """Outcome of an exhaustive or branch-and-bound search."""

    value: int
    witness: PointSet | None
    nodes: int
    seed: int
    wall_time: float
    status: str  # complete | incomplete | greater-than-nmax | unknown
    detail: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "witness": self.witness.to_json() if self.witness is not None else None,
            "nodes": self.nodes,
            "seed": self.seed,
            "wall_time": self.wall_time,
            "status": self.status,
            "detail": _jsonable(self.detail),
        }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, PointSet):
        return obj.to_json()
    if hasattr(obj, "to_json"):
        return obj.to_json()
    if isinstance(obj, (int, float, str, bool)) or obj is None:
        return obj
    return str(obj)


class Stopwatch:
    def __init__(self) -> None:
        self.t0 = time.time()

    def elapsed(self) -> float:
        return time.time() - self.t0
