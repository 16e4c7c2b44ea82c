from __future__ import annotations

import copy
import json
import os
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib  # type: ignore[no-redef]
from dataclasses import dataclass, field
from typing import Any

import jsonschema

from kkspectra.scenarios import SCENARIOS
from kkspectra.utils.errors import ConfigError

CONFIG_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["scenario"],
    "additionalProperties": False,
    "properties": {
        "scenario": {"type": "string"},
        "label": {"type": "string", "pattern": "^[A-Za-z0-9_.-]+$"},
        "seed": {"type": "integer", "minimum": 0},
        "params": {"type": "object"},
        "outputs": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "plots": {"type": "boolean"},
                "operators": {"type": "boolean"},
                "dot": {"type": "boolean"},
            },
        },
    },
}


@dataclass
class ScenarioConfig:
    scenario: str
    seed: int = 0
    params: dict[str, Any] = field(default_factory=dict)
    plots: bool = False
    operators: bool = False
    dot: bool = False
    label: str = ""

    def __post_init__(self) -> None:
        if not self.label:
            self.label = self.scenario


def load_document(path: str) -> dict[str, Any]:
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    try:
        if path.endswith(".toml"):
            with open(path, "rb") as f:
                return tomllib.load(f)
        with open(path, "r") as f:
            doc = json.load(f)
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as e:
        raise ConfigError(f"could not parse {path}: {e}") from e
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return doc


def _validate(doc: Any, schema: dict[str, Any], where: str) -> None:
    try:
        jsonschema.validate(instance=doc, schema=schema, cls=jsonschema.Draft202012Validator)
    except jsonschema.ValidationError as e:
        path = "/".join(str(p) for p in e.absolute_path)
        raise ConfigError(f"schema violation in {where} at '{path}': {e.message}") from e


def config_from_document(doc: dict[str, Any], seed: int | None = None) -> ScenarioConfig:
    _validate(doc, CONFIG_SCHEMA, "config")
    name = doc["scenario"]
    if name not in SCENARIOS:
        raise ConfigError(f"unknown scenario '{name}'")
    module = SCENARIOS[name]
    params = copy.deepcopy(module.DEFAULTS)
    params.update(doc.get("params", {}))
    _validate(params, module.PARAMS_SCHEMA, f"params of {name}")
    outputs = doc.get("outputs", {})
    return ScenarioConfig(
        scenario=name,
        seed=int(doc.get("seed", 0) if seed is None else seed),
        params=params,
        plots=bool(outputs.get("plots", False)),
        operators=bool(outputs.get("operators", False)),
        dot=bool(outputs.get("dot", False)),
        label=doc.get("label", ""),
    )


def load_config(path: str, seed: int | None = None) -> ScenarioConfig:
    return config_from_document(load_document(path), seed)


def builtin_config(name: str, seed: int | None = None, plots: bool = False) -> ScenarioConfig:
    doc: dict[str, Any] = {"scenario": name, "outputs": {"plots": plots}}
    return config_from_document(doc, seed)
