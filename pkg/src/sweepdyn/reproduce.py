"""Run presets and render the figure catalogue."""

from __future__ import annotations

from sweepdyn.config import RunConfig, parse_config
from sweepdyn.integrator import Trajectory, integrate
from sweepdyn.presets import FIGURES, load_preset
from sweepdyn.svg import Series, line_plot


def preset_config(name: str) -> RunConfig:
    return parse_config(load_preset(name))


def simulate(cfg: RunConfig) -> Trajectory:
    return integrate(cfg.model, cfg.schedule, cfg.initial_state, cfg.t_span, cfg.solver, cfg.output_grid)


def render(traj: Trajectory, kind: str, title: str = "") -> str:
    t = traj.times
    if kind == "series" and traj.model.kind.value == "tk":
        return line_plot(
            [
                Series("Population, N", t, traj.component("N")),
                Series("Internal conflict, W", t, traj.component("W")),
                Series("State resources, S", t, traj.component("S"), secondary=True),
            ],
            title=title,
            xlabel="t",
            ylabel="Population N, internal conflict W",
            ylabel_right="State resources S",
            vlines=traj.breakpoints,
        )
    if kind == "phase":
        return line_plot(
            [Series("orbit", traj.component(0), traj.component(1))],
            title=title,
            xlabel=f"prey {traj.model.components[0]}",
            ylabel=f"predator {traj.model.components[1]}",
        )
    if kind == "prey":
        return line_plot(
            [Series("prey R", t, traj.component(0))],
            title=title,
            xlabel="t",
            ylabel="prey R",
            vlines=traj.breakpoints,
        )
    series = [Series(name, t, traj.component(i)) for i, name in enumerate(traj.model.components)]
    return line_plot(series, title=title, xlabel="t", vlines=traj.breakpoints)


def reproduce_figure(figure: str) -> tuple[Trajectory, str]:
    """Trajectory and SVG text for a figure id such as ``"fig6"``."""
    preset, kind = FIGURES[figure]
    traj = simulate(preset_config(preset))
    return traj, render(traj, kind, title=f"{figure}: {preset}")
