"""Run configuration: JSON schema, validation and materialisation.

A configuration file is a JSON object. ``schedule`` holds either inline
segments or ``{"preset": "<name>"}`` to borrow a preset's schedule.
Unknown keys are rejected everywhere.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import jsonschema
import numpy as np

from sweepdyn.errors import ConfigError, InvalidParameters
from sweepdyn.integrator import SolverConfig
from sweepdyn.model import PARAMS_FOR_KIND, ModelKind, ModelSpec, ParamSchedule
from sweepdyn.presets import PRESET_NAMES, load_preset
from sweepdyn.sweep import STATISTICS, SweepConfig

_POSITIVE = {"type": "number", "exclusiveMinimum": 0}
_NUMBER = {"type": "number"}

_PARAMS = {
    "type": "object",
    "additionalProperties": _POSITIVE,
}

SCHEMA: dict[str, Any] = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "sweepdyn run configuration",
    "type": "object",
    "additionalProperties": False,
    "required": ["model", "initial_state", "t_span", "schedule"],
    "properties": {
        "name": {"type": "string"},
        "description": {"type": "string"},
        "model": {"enum": [k.value for k in ModelKind]},
        "initial_state": {"type": "array", "items": {"type": "number", "minimum": 0}, "minItems": 1, "maxItems": 3},
        "t_span": {"type": "array", "items": _NUMBER, "minItems": 2, "maxItems": 2},
        "solver": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "rel_tol": _POSITIVE,
                "abs_tol": _POSITIVE,
                "h_init": _POSITIVE,
                "h_min": _POSITIVE,
                "h_max": _POSITIVE,
                "max_steps": {"type": "integer", "minimum": 1},
                "nonnegative_mask": {"type": "array", "items": {"type": "boolean"}},
                "fixed_step": _POSITIVE,
            },
        },
        "schedule": {
            "oneOf": [
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["preset"],
                    "properties": {"preset": {"enum": list(PRESET_NAMES)}},
                },
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["segments"],
                    "properties": {
                        "segments": {
                            "type": "array",
                            "minItems": 1,
                            "items": {
                                "type": "object",
                                "additionalProperties": False,
                                "required": ["t_start", "params"],
                                "properties": {"t_start": _NUMBER, "params": _PARAMS},
                            },
                        },
                        "horizon_end": _NUMBER,
                    },
                },
            ]
        },
        "output_grid": {
            "oneOf": [
                {"type": "null"},
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["start", "stop", "num"],
                    "properties": {
                        "start": _NUMBER,
                        "stop": _NUMBER,
                        "num": {"type": "integer", "minimum": 2},
                    },
                },
            ]
        },
        "outputs": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "trajectory_csv": {"type": "boolean"},
                "analysis_json": {"type": "boolean"},
                "plot_svg": {"type": "boolean"},
            },
        },
        "output_dir": {"type": "string"},
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "breakpoints": {"type": "array", "items": _NUMBER},
                "threshold": {"type": "number", "exclusiveMinimum": 1},
                "window": _POSITIVE,
                "fallback_window": _POSITIVE,
                "statistic": {"enum": list(STATISTICS)},
                "max_subset_size": {"type": "integer", "minimum": 1, "maximum": 9},
            },
        },
    },
}


@dataclass
class Outputs:
    trajectory_csv: bool = True
    analysis_json: bool = False
    plot_svg: bool = False


@dataclass
class RunConfig:
    model: ModelSpec
    initial_state: tuple[float, ...]
    t_span: tuple[float, float]
    schedule: ParamSchedule
    solver: SolverConfig = field(default_factory=SolverConfig)
    output_grid: Optional[np.ndarray] = None
    outputs: Outputs = field(default_factory=Outputs)
    output_dir: str = "out"
    name: str = "run"
    sweep: SweepConfig = field(default_factory=SweepConfig)
    breakpoints: tuple[float, ...] = ()
    max_subset_size: int = 4


def _path(error: jsonschema.ValidationError) -> str:
    parts = [str(p) for p in error.absolute_path]
    return ".".join(parts) if parts else "<root>"


def validate_document(doc: Any) -> None:
    validator = jsonschema.Draft7Validator(SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: (len(list(e.absolute_path)), _path(e)))
    if errors:
        best = jsonschema.exceptions.best_match(errors)
        raise ConfigError(f"{_path(best)}: {best.message}")


def _schedule(doc: dict, kind: ModelKind, t_span) -> ParamSchedule:
    sched = doc["schedule"]
    if "preset" in sched:
        preset = load_preset(sched["preset"])
        if preset["model"] != kind.value:
            raise ConfigError(f"schedule.preset: preset {sched['preset']!r} is for model {preset['model']!r}")
        sched = preset["schedule"]
    params_cls = PARAMS_FOR_KIND[kind]
    segments = []
    for i, seg in enumerate(sched["segments"]):
        try:
            segments.append((seg["t_start"], params_cls.from_dict(seg["params"])))
        except InvalidParameters as exc:
            raise ConfigError(f"schedule.segments.{i}.params: {exc}") from None
    horizon = sched.get("horizon_end", t_span[1])
    try:
        return ParamSchedule(tuple(segments), horizon, schedule_id=doc.get("name", ""))
    except InvalidParameters as exc:
        raise ConfigError(f"schedule: {exc}") from None


def parse_config(doc: Any) -> RunConfig:
    """Validate a decoded JSON document and build a :class:`RunConfig`."""
    validate_document(doc)
    kind = ModelKind(doc["model"])
    model = ModelSpec(kind)
    y0 = tuple(float(v) for v in doc["initial_state"])
    if len(y0) != model.dimension:
        raise ConfigError(f"initial_state: model {kind.value!r} needs {model.dimension} components, got {len(y0)}")
    t0, tf = (float(v) for v in doc["t_span"])
    if not t0 < tf:
        raise ConfigError(f"t_span: start {t0!r} must precede end {tf!r}")

    schedule = _schedule(doc, kind, (t0, tf))
    if schedule.start > t0 or schedule.horizon_end < tf:
        raise ConfigError(
            f"schedule: covers [{schedule.start!r}, {schedule.horizon_end!r}], which does not contain t_span"
        )

    solver_doc = dict(doc.get("solver", {}))
    if "nonnegative_mask" in solver_doc:
        mask = solver_doc["nonnegative_mask"]
        if len(mask) != model.dimension:
            raise ConfigError(f"solver.nonnegative_mask: needs {model.dimension} entries")
        solver_doc["nonnegative_mask"] = tuple(mask)
    try:
        solver = SolverConfig(**solver_doc)
    except InvalidParameters as exc:
        raise ConfigError(f"solver: {exc}") from None

    grid = None
    grid_doc = doc.get("output_grid")
    if grid_doc is not None:
        if not (t0 <= grid_doc["start"] < grid_doc["stop"] <= tf):
            raise ConfigError("output_grid: start/stop must satisfy t0 <= start < stop <= tf")
        grid = np.linspace(grid_doc["start"], grid_doc["stop"], grid_doc["num"])

    sweep_doc = doc.get("sweep", {})
    sweep = SweepConfig(
        sweep_threshold=sweep_doc.get("threshold", SweepConfig.sweep_threshold),
        window=sweep_doc.get("window"),
        fallback_window=sweep_doc.get("fallback_window", SweepConfig.fallback_window),
        statistic=sweep_doc.get("statistic", SweepConfig.statistic),
    )
    breakpoints = tuple(float(b) for b in sweep_doc.get("breakpoints", schedule.breakpoints))

    return RunConfig(
        model=model,
        initial_state=y0,
        t_span=(t0, tf),
        schedule=schedule,
        solver=solver,
        output_grid=grid,
        outputs=Outputs(**doc.get("outputs", {})),
        output_dir=doc.get("output_dir", "out"),
        name=doc.get("name", "run"),
        sweep=sweep,
        breakpoints=breakpoints,
        max_subset_size=sweep_doc.get("max_subset_size", 4),
    )


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {str(path)!r}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    return parse_config(doc)
