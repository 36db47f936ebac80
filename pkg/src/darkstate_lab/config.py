"""Run configuration: JSON documents validated against a schema, with key=value overrides."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import jsonschema
import numpy as np

from .model import ModelParams

COMMANDS = ("spectrum", "sweep", "perturb", "evolve", "verify")

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "omega": {"type": "number"},
        "u": {"type": "number", "minimum": 0},
        "u_grid": {
            "type": "object",
            "additionalProperties": False,
            "required": ["lo", "hi", "steps"],
            "properties": {
                "lo": {"type": "number", "minimum": 0},
                "hi": {"type": "number", "minimum": 0},
                "steps": {"type": "integer", "minimum": 2},
            },
        },
        "gamma": {"type": "number", "exclusiveMinimum": 0},
        "local_dim": {"type": "integer", "minimum": 2},
        "manifold": {
            "oneOf": [
                {"type": "integer", "minimum": 0},
                {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1},
            ]
        },
        "t_end": {"type": "number", "exclusiveMinimum": 0},
        "dt": {"type": "number", "exclusiveMinimum": 0},
        "sample_every": {"type": "number", "exclusiveMinimum": 0},
        "mode": {"enum": ["lindblad", "nonhermitian_renormalized"]},
        "order": {"enum": [0, 1, 2]},
        "output_dir": {"type": "string"},
    },
}

DEFAULTS = {
    "spectrum": {"omega": 1.0, "u": 0.0},
    "sweep": {"omega": 0.0, "manifold": 2, "u_grid": {"lo": 0.0, "hi": 2.5, "steps": 251}},
    "perturb": {"omega": 0.0, "manifold": list(range(7)), "u_grid": {"lo": 0.0, "hi": 0.5, "steps": 51}},
    "evolve": {"omega": 0.0, "u": 0.5, "manifold": 2, "t_end": 20.0},
    "verify": {},
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    omega: float = 0.0
    u: float = 0.0
    u_grid: dict | None = None
    gamma: float = 1.0
    local_dim: int = 6
    manifold: int | list[int] | None = None
    t_end: float = 20.0
    dt: float = 0.005
    sample_every: float = 0.05
    mode: str = "lindblad"
    order: int = 2
    output_dir: str = "."
    extra: dict = field(default_factory=dict, repr=False)

    def params(self, u: float | None = None) -> ModelParams:
        try:
            return ModelParams(self.omega, self.u if u is None else u, self.gamma, self.local_dim)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def grid(self) -> np.ndarray:
        if self.u_grid is None:
            raise ConfigError(f"'{self.command}' needs u_grid {{lo, hi, steps}}")
        g = self.u_grid
        if g["steps"] < 2:
            raise ConfigError("u_grid.steps must be >= 2")
        if not g["lo"] < g["hi"]:
            raise ConfigError("u_grid.lo must be < u_grid.hi")
        return np.linspace(g["lo"], g["hi"], g["steps"])

    def manifolds(self) -> list[int]:
        if self.manifold is None:
            raise ConfigError(f"'{self.command}' needs a manifold")
        return [self.manifold] if isinstance(self.manifold, int) else list(self.manifold)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("extra")
        return d


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(doc: dict, overrides: list[str]) -> dict:
    doc = json.loads(json.dumps(doc))
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value")
        key, value = item.split("=", 1)
        parts = key.strip().split(".")
        target = doc
        for p in parts[:-1]:
            target = target.setdefault(p, {})
            if not isinstance(target, dict):
                raise ConfigError(f"cannot set {key}: {p} is not an object")
        target[parts[-1]] = _parse_value(value)
    return doc


def load_config(command: str, path: str | Path | None = None, overrides: list[str] | None = None,
                output_dir: str | None = None) -> RunConfig:
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    doc: dict = json.loads(json.dumps(DEFAULTS[command]))
    if path is not None:
        try:
            user = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(user, dict):
            raise ConfigError("config must be a JSON object")
        doc.update(user)
    doc = apply_overrides(doc, overrides or [])
    if output_dir is not None:
        doc["output_dir"] = output_dir
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"invalid config: {exc.message}") from exc
    cfg = RunConfig(command=command, **doc)
    cfg.params()
    if cfg.u_grid is not None:
        cfg.grid()
    return cfg
