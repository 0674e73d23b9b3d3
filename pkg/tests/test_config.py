import copy
import json

import pytest

from sweepdyn.config import SCHEMA, load_config, parse_config, validate_document
from sweepdyn.errors import ConfigError
from sweepdyn.model import TABLE1, ModelKind
from sweepdyn.presets import PRESET_NAMES, load_preset

MINIMAL = {
    "model": "tk",
    "initial_state": [1, 0, 1],
    "t_span": [1, 4000],
    "schedule": {"segments": [{"t_start": 1, "params": TABLE1.as_dict()}]},
}


def test_minimal_defaults():
    cfg = parse_config(MINIMAL)
    assert cfg.model.kind is ModelKind.TURCHIN_KOROTAYEV
    assert cfg.schedule.horizon_end == 4000.0
    assert cfg.solver.rel_tol == 1e-6 and cfg.output_grid is None
    assert cfg.outputs.trajectory_csv and not cfg.outputs.plot_svg
    assert cfg.name == "run" and cfg.output_dir == "out"
    assert cfg.breakpoints == () and cfg.max_subset_size == 4


def test_preset_schedule_reference():
    doc = dict(MINIMAL, schedule={"preset": "tk-table2"}, sweep={"threshold": 1.2, "statistic": "max"})
    cfg = parse_config(doc)
    assert cfg.schedule.breakpoints == [1000.0, 2000.0]
    assert cfg.breakpoints == (1000.0, 2000.0)
    assert cfg.sweep.sweep_threshold == 1.2 and cfg.sweep.statistic == "max"


def _bad(path, value):
    doc = copy.deepcopy(MINIMAL)
    node = doc
    for key in path[:-1]:
        node = node[key]
    node[path[-1]] = value
    return doc


@pytest.mark.parametrize(
    "doc, field",
    [
        (_bad(["solver"], {"rel_tol": -1e-6}), "solver.rel_tol"),
        (_bad(["solver"], {"tolerance": 1}), "solver"),
        (_bad(["extra"], 1), "<root>"),
        (_bad(["model"], "sir"), "model"),
        (_bad(["initial_state"], [1, 0]), "initial_state"),
        (_bad(["initial_state"], [1, -1, 0]), "initial_state.1"),
        (_bad(["t_span"], [5, 1]), "t_span"),
        (_bad(["schedule", "segments", 0, "params", "kmax"], 0), "schedule"),
        (_bad(["schedule", "segments", 0, "params"], {"kmax": 1}), "schedule.segments.0.params"),
        (_bad(["schedule", "segments", 0, "t_start"], 2), "schedule"),
        (_bad(["schedule"], {"preset": "lv-baseline"}), "schedule.preset"),
        (_bad(["output_grid"], {"start": 0, "stop": 10, "num": 11}), "output_grid"),
        (_bad(["sweep"], {"threshold": 0.9}), "sweep.threshold"),
    ],
)
def test_rejections_name_the_field(doc, field):
    with pytest.raises(ConfigError) as info:
        parse_config(doc)
    assert str(info.value).startswith(field)


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError, match="invalid JSON"):
        load_config(bad)
    good = tmp_path / "good.json"
    good.write_text(json.dumps(MINIMAL))
    assert load_config(good).t_span == (1.0, 4000.0)


def test_every_preset_validates():
    for name in PRESET_NAMES:
        validate_document(load_preset(name))
        parse_config(load_preset(name))
    assert SCHEMA["additionalProperties"] is False
