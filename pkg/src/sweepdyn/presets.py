"""Named scenario presets and the figure catalogue.

Each preset is a complete run configuration (see :mod:`sweepdyn.config`).
The JSON files shipped in ``sweepdyn/configs/`` are the golden copies;
:func:`build_preset` regenerates them from the parameter tables.
"""

from __future__ import annotations

import json
from importlib import resources

from sweepdyn.model import TABLE1

TK_BREAKPOINTS = (1000.0, 2000.0)

# Second- and third-regime values of the switched Turchin-Korotayev runs.
TABLE2 = {"kmax": (5.0, 7.0), "r0": (0.095, 0.15), "delta": (0.45, 0.95)}
TABLE3 = {"kmax": (5.0, 7.0), "beta": (1 / 12, 1 / 36), "rho0": (1 / 3, 1 / 9)}
TABLE4 = {"a": (1 / 300, 1 / 900), "b": (0.15, 0.45), "alpha": (0.3, 0.9)}

TK_SWITCHED = {
    "tk-table2": TABLE2,
    "tk-table3": TABLE3,
    "tk-table4": TABLE4,
    "tk-kmax-only": {"kmax": TABLE2["kmax"]},
    "tk-r0-only": {"r0": TABLE2["r0"]},
    "tk-delta-only": {"delta": TABLE2["delta"]},
}

LV_BASE = {"alpha": 5.0, "beta": 0.1, "gamma": 0.1, "delta": 5.0}
# (switch time, gamma) pairs.
LV_GAMMA_TEXT = ((500.0, 0.2), (1000.0, 0.3), (3000.0, 0.1))
LV_GAMMA_CODE = ((50.0, 0.2), (100.0, 0.3), (300.0, 0.1))

PRESET_NAMES = (
    "tk-baseline",
    "tk-table2",
    "tk-table3",
    "tk-table4",
    "tk-kmax-only",
    "tk-r0-only",
    "tk-delta-only",
    "lv-baseline",
    "lv-switched-text",
    "lv-switched-code",
)

#: figure id -> (preset, plot kind)
FIGURES = {
    "fig2": ("tk-baseline", "series"),
    "fig3": ("lv-baseline", "phase"),
    "fig4": ("lv-switched-code", "phase"),
    "fig5": ("lv-switched-code", "prey"),
    "fig6": ("tk-table2", "series"),
    "fig7": ("tk-kmax-only", "series"),
    "fig8": ("tk-r0-only", "series"),
    "fig9": ("tk-delta-only", "series"),
    "fig10": ("tk-table3", "series"),
    "fig11": ("tk-table4", "series"),
}


def _tk(name: str, segments: list, description: str) -> dict:
    return {
        "name": name,
        "description": description,
        "model": "tk",
        "initial_state": [1.0, 0.0, 1.0],
        "t_span": [1.0, 4000.0],
        "solver": {"rel_tol": 1e-6, "abs_tol": 1e-10},
        "schedule": {"segments": segments, "horizon_end": 4000.0},
        "output_grid": {"start": 1.0, "stop": 4000.0, "num": 4000},
        "outputs": {"trajectory_csv": True, "analysis_json": False, "plot_svg": True},
        "sweep": {"breakpoints": list(TK_BREAKPOINTS)},
    }


def _tk_switched(name: str, changes: dict) -> dict:
    base = TABLE1.as_dict()
    segments = [{"t_start": 1.0, "params": base}]
    for phase, t_start in enumerate(TK_BREAKPOINTS):
        params = dict(base)
        params.update({k: v[phase] for k, v in changes.items()})
        segments.append({"t_start": t_start, "params": params})
    return _tk(name, segments, f"baseline values with {', '.join(changes)} switched at t=1000 and t=2000")


def _lv(name: str, switches, t_end: float, step: float, description: str) -> dict:
    segments = [{"t_start": 1.0, "params": dict(LV_BASE)}]
    for t_start, gamma in switches:
        segments.append({"t_start": t_start, "params": dict(LV_BASE, gamma=gamma)})
    return {
        "name": name,
        "description": description,
        "model": "lv",
        "initial_state": [100.0, 100.0],
        "t_span": [1.0, t_end],
        "solver": {"rel_tol": 1e-6, "abs_tol": 1e-10},
        "schedule": {"segments": segments, "horizon_end": t_end},
        "output_grid": {"start": 1.0, "stop": t_end, "num": int(round((t_end - 1.0) / step)) + 1},
        "outputs": {"trajectory_csv": True, "analysis_json": False, "plot_svg": True},
    }


def build_preset(name: str) -> dict:
    if name == "tk-baseline":
        return _tk(name, [{"t_start": 1.0, "params": TABLE1.as_dict()}], "baseline parameter values, constant")
    if name in TK_SWITCHED:
        return _tk_switched(name, TK_SWITCHED[name])
    if name == "lv-baseline":
        return _lv(name, (), 350.0, 0.01, "predator-prey, constant parameters")
    if name == "lv-switched-text":
        return _lv(name, LV_GAMMA_TEXT, 3500.0, 0.05, "gamma switched at t=500, 1000, 3000")
    if name == "lv-switched-code":
        return _lv(name, LV_GAMMA_CODE, 350.0, 0.01, "gamma switched at t=50, 100, 300")
    raise KeyError(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")


def dump_preset(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def golden_text(name: str) -> str:
    if name not in PRESET_NAMES:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")
    return resources.files("sweepdyn").joinpath("configs", f"{name}.json").read_text()


def load_preset(name: str) -> dict:
    return json.loads(golden_text(name))
