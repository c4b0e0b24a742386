"""Experiment configuration: a single JSON document, strictly validated.

Unknown fields are rejected at every level and all values are type-checked,
so a config that parses is exactly the config that runs.  Parsed configs
round-trip losslessly through ``to_dict``.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any

from .integrate import SimConfig

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Config validation failure, annotated with the offending field path."""


_MISSING = object()


def _require(d: dict, path: str, key: str, types, default=_MISSING):
    if key not in d:
        if default is not _MISSING:
            return default
        raise ConfigError(f"{path}: missing required field {key!r}")
    v = d[key]
    if not isinstance(v, types):
        tn = types.__name__ if isinstance(types, type) else "/".join(t.__name__ for t in types)
        raise ConfigError(f"{path}.{key}: expected {tn}, got {type(v).__name__}")
    return v


def _reject_unknown(d: dict, path: str, known: set[str]):
    extra = set(d) - known
    if extra:
        raise ConfigError(f"{path}: unknown fields {sorted(extra)}")


@dataclass(frozen=True)
class MeanfieldConfig:
    beta: float
    n_ladder: tuple[int, ...]
    seeds: int
    dt: float
    t_end: float
    cadence: int
    test_degrees: tuple[int, ...]

    @staticmethod
    def from_dict(d: dict, path: str = "meanfield") -> "MeanfieldConfig":
        _reject_unknown(d, path, {"beta", "n_ladder", "seeds", "dt", "t_end",
                                  "cadence", "test_degrees"})
        return MeanfieldConfig(
            beta=float(_require(d, path, "beta", (int, float))),
            n_ladder=tuple(int(v) for v in _require(d, path, "n_ladder", list)),
            seeds=int(_require(d, path, "seeds", int)),
            dt=float(_require(d, path, "dt", (int, float))),
            t_end=float(_require(d, path, "t_end", (int, float))),
            cadence=int(_require(d, path, "cadence", int, 10)),
            test_degrees=tuple(int(v) for v in _require(d, path, "test_degrees", list, [1, 2, 4])),
        )


@dataclass(frozen=True)
class DiagnosticsConfig:
    occupation_ladder: tuple[float, ...]
    collision_eps: float
    detector_faces: bool

    @staticmethod
    def from_dict(d: dict, path: str = "diagnostics") -> "DiagnosticsConfig":
        _reject_unknown(d, path, {"occupation_ladder", "collision_eps", "detector_faces"})
        return DiagnosticsConfig(
            occupation_ladder=tuple(
                float(v) for v in _require(d, path, "occupation_ladder", list,
                                           [1e-2, 1e-3, 1e-4, 1e-6])),
            collision_eps=float(_require(d, path, "collision_eps", (int, float), 1e-6)),
            detector_faces=bool(_require(d, path, "detector_faces", bool, False)),
        )


@dataclass(frozen=True)
class CheckConfig:
    t_max: float
    radius: float
    n_points: int
    seed: int

    @staticmethod
    def from_dict(d: dict, path: str = "check") -> "CheckConfig":
        _reject_unknown(d, path, {"t_max", "radius", "n_points", "seed"})
        return CheckConfig(
            t_max=float(_require(d, path, "t_max", (int, float), 1.0)),
            radius=float(_require(d, path, "radius", (int, float), 5.0)),
            n_points=int(_require(d, path, "n_points", int, 64)),
            seed=int(_require(d, path, "seed", int, 20240)),
        )


@dataclass
class ExperimentConfig:
    """Parsed experiment description (see README for the schema)."""

    preset_name: str
    preset_params: dict
    sim: SimConfig | None = None
    x0: tuple[float, ...] | None = None
    ensemble_size: int | None = None
    diagnostics: DiagnosticsConfig | None = None
    meanfield: MeanfieldConfig | None = None
    check: CheckConfig | None = None
    raw: dict = field(default_factory=dict, repr=False)

    @staticmethod
    def from_dict(doc: dict) -> "ExperimentConfig":
        if not isinstance(doc, dict):
            raise ConfigError("config root must be an object")
        _reject_unknown(doc, "config", {"schema_version", "preset", "sim", "x0",
                                        "ensemble", "diagnostics", "meanfield", "check"})
        version = _require(doc, "config", "schema_version", int)
        if version != SCHEMA_VERSION:
            raise ConfigError(f"config.schema_version: expected {SCHEMA_VERSION}, got {version}")
        preset = _require(doc, "config", "preset", dict)
        _reject_unknown(preset, "preset", {"name", "params"})
        name = _require(preset, "preset", "name", str)
        params = _require(preset, "preset", "params", dict, {})

        sim = None
        if "sim" in doc:
            s = _require(doc, "config", "sim", dict)
            _reject_unknown(s, "sim", {"dt", "t_end", "seed", "scheme", "wall_eps",
                                       "drift_cap", "record_stride", "explosion_radius"})
            try:
                sim = SimConfig(
                    dt=float(_require(s, "sim", "dt", (int, float))),
                    t_end=float(_require(s, "sim", "t_end", (int, float))),
                    seed=int(_require(s, "sim", "seed", int, 0)),
                    scheme=_require(s, "sim", "scheme", str, "direct"),
                    wall_eps=float(_require(s, "sim", "wall_eps", (int, float), 0.0)),
                    drift_cap=float(_require(s, "sim", "drift_cap", (int, float), 0.5)),
                    record_stride=int(_require(s, "sim", "record_stride", int, 1)),
                    explosion_radius=float(_require(s, "sim", "explosion_radius",
                                                    (int, float), 1e8)),
                )
            except ValueError as exc:
                raise ConfigError(f"sim: {exc}") from exc

        x0 = None
        if "x0" in doc:
            raw_x0 = _require(doc, "config", "x0", list)
            if not all(isinstance(v, (int, float)) for v in raw_x0):
                raise ConfigError("x0: expected a list of numbers")
            x0 = tuple(float(v) for v in raw_x0)

        ensemble_size = None
        if "ensemble" in doc:
            e = _require(doc, "config", "ensemble", dict)
            _reject_unknown(e, "ensemble", {"size"})
            ensemble_size = int(_require(e, "ensemble", "size", int))
            if ensemble_size < 1:
                raise ConfigError("ensemble.size: must be >= 1")

        return ExperimentConfig(
            preset_name=name,
            preset_params=dict(params),
            sim=sim,
            x0=x0,
            ensemble_size=ensemble_size,
            diagnostics=(DiagnosticsConfig.from_dict(doc["diagnostics"])
                         if "diagnostics" in doc else None),
            meanfield=(MeanfieldConfig.from_dict(doc["meanfield"])
                       if "meanfield" in doc else None),
            check=CheckConfig.from_dict(doc["check"]) if "check" in doc else None,
            raw=doc,
        )

    @staticmethod
    def load(path: str) -> "ExperimentConfig":
        with open(path, "r", encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
        return ExperimentConfig.from_dict(doc)

    def to_dict(self) -> dict:
        return self.raw

    def canonical_json(self) -> str:
        return json.dumps(self.raw, sort_keys=True, separators=(",", ":"))

    def hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()[:16]
