"""Command-line front end: ``sweepdyn simulate|analyze|scan|reproduce``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from sweepdyn import __version__
from sweepdyn.analysis import limit_cycle_report, stability_report
from sweepdyn.config import RunConfig, load_config, parse_config
from sweepdyn.errors import (
    ConfigError,
    InsufficientOscillations,
    NoInteriorEquilibrium,
    NumericalError,
    SingularCarryingCapacity,
    WindowOutOfRange,
)
from sweepdyn.io import atomic_write, write_json, write_trajectory_csv
from sweepdyn.model import ModelKind, params_at
from sweepdyn.presets import FIGURES, load_preset
from sweepdyn.reproduce import render, reproduce_figure, simulate
from sweepdyn.sweep import SCAN_FACTORS, scan_subsets, scan_to_csv

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_NO_EQUILIBRIUM = 4


def _fail(code: int, message: str) -> int:
    print(f"sweepdyn: error: {message}", file=sys.stderr)
    return code


def _load(args) -> RunConfig:
    if getattr(args, "preset", None):
        try:
            return parse_config(load_preset(args.preset))
        except KeyError as exc:
            raise ConfigError(str(exc.args[0])) from None
    return load_config(args.config)


def _outdir(args, cfg: RunConfig) -> Path:
    return Path(args.out) if getattr(args, "out", None) else Path(cfg.output_dir)


def _analysis_doc(cfg: RunConfig, traj=None) -> dict:
    p = params_at(cfg.schedule, cfg.t_span[0])
    report = stability_report(p)
    if traj is not None:
        report.solver_stats = traj.stats.as_dict()
        try:
            lc = limit_cycle_report(traj, "N", 0.5)
            report.extras["limit_cycle"] = {
                "converged": lc.converged,
                "period": lc.period,
                "amplitude": lc.amplitude,
            }
        except InsufficientOscillations:
            report.extras["limit_cycle"] = None
    return report.to_json()


def cmd_simulate(args) -> int:
    cfg = _load(args)
    out = _outdir(args, cfg)
    traj = simulate(cfg)
    written = []
    if cfg.outputs.trajectory_csv:
        written.append(write_trajectory_csv(traj, out / f"{cfg.name}.csv"))
    if cfg.outputs.plot_svg:
        kind = "series" if cfg.model.kind is ModelKind.TURCHIN_KOROTAYEV else "phase"
        written.append(atomic_write(out / f"{cfg.name}.svg", render(traj, kind, title=cfg.name)))
    if cfg.outputs.analysis_json and cfg.model.kind is ModelKind.TURCHIN_KOROTAYEV:
        written.append(write_json(_analysis_doc(cfg, traj), out / f"{cfg.name}-analysis.json"))
    for path in written:
        print(path)
    s = traj.stats
    print(
        f"{cfg.name}: {len(traj)} samples, {s.steps_accepted} accepted / "
        f"{s.steps_rejected} rejected steps, {s.rhs_evaluations} rhs evaluations",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_analyze(args) -> int:
    cfg = _load(args)
    if cfg.model.kind is not ModelKind.TURCHIN_KOROTAYEV:
        raise ConfigError("model: analyze requires the 'tk' model")
    p = params_at(cfg.schedule, cfg.t_span[0])
    stability_report(p)  # fail fast on a missing equilibrium
    try:
        traj = simulate(cfg)
    except (NumericalError, SingularCarryingCapacity) as exc:
        print(f"sweepdyn: warning: simulation failed ({exc}); solver_stats omitted", file=sys.stderr)
        traj = None
    doc = _analysis_doc(cfg, traj)
    text = json.dumps(doc, indent=2)
    print(text)
    if getattr(args, "out", None) or cfg.outputs.analysis_json:
        write_json(doc, _outdir(args, cfg) / f"{cfg.name}-analysis.json")
    return EXIT_OK


def cmd_scan(args) -> int:
    cfg = _load(args)
    if cfg.model.kind is not ModelKind.TURCHIN_KOROTAYEV:
        raise ConfigError("model: scan requires the 'tk' model")
    breakpoints = cfg.breakpoints or (1000.0, 2000.0)
    if len(breakpoints) != 2:
        raise ConfigError("sweep.breakpoints: the scan needs exactly two breakpoints")
    size = args.max_subset_size if args.max_subset_size is not None else cfg.max_subset_size
    if not 1 <= size <= 9:
        raise ConfigError(f"--max-subset-size must lie in 1..9, got {size}")
    base = cfg.schedule.segments[0][1]
    grid_points = len(cfg.output_grid) if cfg.output_grid is not None else 4000
    results = scan_subsets(
        base,
        SCAN_FACTORS,
        breakpoints,
        y0=cfg.initial_state,
        t_span=cfg.t_span,
        solver=cfg.solver,
        sweep=cfg.sweep,
        grid_points=grid_points,
        max_subset_size=size,
        workers=args.workers,
    )
    out = _outdir(args, cfg)
    csv_path = atomic_write(out / f"{cfg.name}-scan.csv", scan_to_csv(results, breakpoints))
    json_path = write_json([r.as_dict() for r in results], out / f"{cfg.name}-scan.json")
    print(csv_path)
    print(json_path)
    failed = sum(r.error is not None for r in results)
    swept = sum(r.sweep_detected for r in results)
    print(f"scan: {len(results)} subsets, {swept} with sweeps, {failed} failed", file=sys.stderr)
    if failed == len(results):
        return _fail(EXIT_NUMERIC, "every subset integration failed")
    return EXIT_OK


def cmd_reproduce(args) -> int:
    if args.figure not in FIGURES:
        raise ConfigError(f"unknown figure id {args.figure!r}; choose from {', '.join(FIGURES)}")
    traj, svg = reproduce_figure(args.figure)
    out = Path(args.out or "out")
    print(write_trajectory_csv(traj, out / f"{args.figure}.csv"))
    print(atomic_write(out / f"{args.figure}.svg", svg))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sweepdyn",
        description="Simulate and analyse the Turchin-Korotayev model under parameter switching.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_config(p):
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--config", help="path to a JSON run configuration")
        src.add_argument("--preset", help="use a named preset instead of a config file")

    p = sub.add_parser("simulate", help="integrate a configuration and write CSV/SVG")
    with_config(p)
    p.add_argument("--out", help="output directory (overrides output_dir)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="equilibrium and stability report as JSON")
    with_config(p)
    p.add_argument("--out", help="also write the report into this directory")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("scan", help="scan parameter subsets for upward sweeps")
    with_config(p)
    p.add_argument("--max-subset-size", type=int, default=None)
    p.add_argument("--workers", type=int, default=None, help="worker processes (capped by SWEEPDYN_THREADS)")
    p.add_argument("--out", help="output directory (overrides output_dir)")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("reproduce", help="regenerate a figure as SVG plus CSV")
    p.add_argument("--figure", required=True, help=f"one of {', '.join(FIGURES)}")
    p.add_argument("--out", help="output directory (default: out)")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, str(exc))
    except NoInteriorEquilibrium as exc:
        return _fail(EXIT_NO_EQUILIBRIUM, f"no interior equilibrium: {exc}")
    except (NumericalError, SingularCarryingCapacity, WindowOutOfRange) as exc:
        return _fail(EXIT_NUMERIC, f"{type(exc).__name__}: {exc}")


if __name__ == "__main__":
    sys.exit(main())
