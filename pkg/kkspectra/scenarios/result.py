from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

from kkspectra.utils.cover_graph import CoverGraph


@dataclass(frozen=True)
class Check:
    """value ≤ bound, or value ≥ bound when at_least is set."""

    name: str
    value: float
    bound: float
    at_least: bool = False

    @property
    def ok(self) -> bool:
        if self.at_least:
            return bool(self.value >= self.bound)
        return bool(self.value <= self.bound)

    def to_json(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "value": float(self.value),
            "bound": float(self.bound),
            "relation": ">=" if self.at_least else "<=",
            "ok": self.ok,
        }


@dataclass
class Plot:
    series: dict[str, tuple[Sequence[float], Sequence[float]]]
    title: str
    xlabel: str = "j"
    ylabel: str = "lambda"
    logy: bool = False


@dataclass
class ScenarioResult:
    tables: dict[str, tuple[list[str], list[list[Any]]]] = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)
    plots: dict[str, Plot] = field(default_factory=dict)
    operators: dict[str, tuple[int, int, list[tuple[int, int, float]]]] = field(
        default_factory=dict
    )
    covers: dict[str, CoverGraph] = field(default_factory=dict)
    documents: dict[str, Any] = field(default_factory=dict)

    def check(self, name: str, value: float, bound: float, at_least: bool = False) -> None:
        self.checks.append(Check(name, float(value), float(bound), at_least))

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)


def params_schema(properties: dict[str, Any]) -> dict[str, Any]:
    return {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "type": "object",
        "additionalProperties": False,
        "properties": properties,
    }


POSITIVE = {"type": "number", "exclusiveMinimum": 0}
INTEGER = {"type": "integer"}
COUNT = {"type": "integer", "minimum": 1}
TOLERANCE = {"type": "number", "minimum": 0}
