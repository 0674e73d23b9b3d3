"""Upward-sweep detection and the parameter-subset scan.

A sweep at a breakpoint compares the population in a window just after
the breakpoint with a window of equal length just before it. By default
the window is one oscillation period of the regime being left, and the
compared quantity is the time-averaged level of ``N``; the older
envelope-maximum comparison is available via ``statistic="max"``.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from sweepdyn.errors import SweepdynError, WindowOutOfRange
from sweepdyn.integrator import SolverConfig, Trajectory, integrate
from sweepdyn.model import TK, TK_PARAM_ORDER, ParamSchedule, TkParams
from sweepdyn.peaks import local_maxima_indices

STATISTICS = ("mean", "max")

#: Per-parameter multipliers applied in the second and third regimes of
#: the subset scan, relative to the baseline values.
SCAN_FACTORS: dict[str, tuple[float, float]] = {
    "a": (1 / 3, 1 / 9),
    "b": (3.0, 9.0),
    "c": (3.0, 9.0),
    "kmax": (5 / 3, 7 / 3),
    "r0": (0.095 / 0.015, 0.15 / 0.015),
    "alpha": (3.0, 9.0),
    "beta": (1 / 3, 1 / 9),
    "delta": (9.5, 0.95 / 0.1),
    "rho0": (1 / 3, 1 / 9),
}


@dataclass(frozen=True)
class SweepConfig:
    """``window=None`` uses one pre-breakpoint oscillation period, or
    ``fallback_window`` when fewer than two peaks precede the breakpoint."""

    sweep_threshold: float = 1.05
    window: Optional[float] = None
    fallback_window: float = 500.0
    statistic: str = "mean"

    def __post_init__(self):
        if not (math.isfinite(self.sweep_threshold) and self.sweep_threshold > 1):
            raise ValueError(f"sweep_threshold must exceed 1, got {self.sweep_threshold!r}")
        for name in ("window", "fallback_window"):
            v = getattr(self, name)
            if v is not None and not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive, got {v!r}")
        if self.statistic not in STATISTICS:
            raise ValueError(f"statistic must be one of {STATISTICS}, got {self.statistic!r}")


@dataclass(frozen=True)
class SweepEvent:
    breakpoint_time: float
    window: float
    pre_envelope_max: float
    post_envelope_max: float
    pre_level: float
    post_level: float
    ratio: float
    detected: bool
    statistic: str = "mean"

    def as_dict(self) -> dict:
        return {
            "breakpoint_time": self.breakpoint_time,
            "window": self.window,
            "pre_envelope_max": self.pre_envelope_max,
            "post_envelope_max": self.post_envelope_max,
            "pre_level": self.pre_level,
            "post_level": self.post_level,
            "ratio": self.ratio,
            "detected": self.detected,
            "statistic": self.statistic,
        }


def envelope_maxima(traj: Trajectory, component=0) -> list[tuple[float, float]]:
    """``(t, value)`` at every strict local maximum of one component."""
    values = traj.component(component)
    if len(values) < 3:
        raise ValueError("envelope_maxima needs at least three samples")
    return [(float(traj.times[i]), float(values[i])) for i in local_maxima_indices(values)]


def oscillation_period(times, values, t_start: float, t_end: float, max_peaks: int = 5) -> Optional[float]:
    """Mean spacing of the last few peaks in ``[t_start, t_end]``, if any."""
    keep = (times >= t_start) & (times <= t_end)
    t, y = times[keep], values[keep]
    idx = local_maxima_indices(y)[-max_peaks:]
    if len(idx) < 2:
        return None
    return float(np.mean(np.diff(t[idx])))


def _time_mean(t: np.ndarray, y: np.ndarray) -> float:
    if len(t) == 1 or t[-1] == t[0]:
        return float(np.mean(y))
    return float(np.trapezoid(y, t) / (t[-1] - t[0]))


def detect_sweeps(
    traj: Trajectory,
    breakpoints: Iterable[float],
    cfg: SweepConfig = SweepConfig(),
    component=0,
) -> list[SweepEvent]:
    """One :class:`SweepEvent` per breakpoint.

    The pre window is ``(bp - w, bp]`` and the post window ``(bp, bp + w]``.
    """
    times = np.asarray(traj.times)
    values = np.asarray(traj.component(component))
    bps = sorted(float(b) for b in breakpoints)
    events = []
    for k, bp in enumerate(bps):
        window = cfg.window
        if window is None:
            seg_start = bps[k - 1] if k > 0 else times[0]
            window = oscillation_period(times, values, seg_start, bp) or cfg.fallback_window
        if bp - window < times[0] or bp + window > times[-1]:
            raise WindowOutOfRange(
                f"window {window!r} around breakpoint {bp!r} leaves "
                f"[{times[0]!r}, {times[-1]!r}]"
            )
        pre = (times > bp - window) & (times <= bp)
        post = (times > bp) & (times <= bp + window)
        if not pre.any() or not post.any():
            raise WindowOutOfRange(f"no samples on one side of breakpoint {bp!r}")
        pre_max = float(values[pre].max())
        post_max = float(values[post].max())
        if cfg.statistic == "max":
            pre_level, post_level = pre_max, post_max
        else:
            pre_level = _time_mean(times[pre], values[pre])
            post_level = _time_mean(times[post], values[post])
        ratio = post_level / pre_level if pre_level > 0 else math.inf
        events.append(
            SweepEvent(
                breakpoint_time=bp,
                window=float(window),
                pre_envelope_max=pre_max,
                post_envelope_max=post_max,
                pre_level=pre_level,
                post_level=post_level,
                ratio=ratio,
                detected=bool(ratio >= cfg.sweep_threshold),
                statistic=cfg.statistic,
            )
        )
    return events


def three_phase_schedule(
    base: TkParams,
    subset: Sequence[str],
    factors: dict[str, tuple[float, float]] = SCAN_FACTORS,
    breakpoints: tuple[float, float] = (1000.0, 2000.0),
    t0: float = 1.0,
    tf: float = 4000.0,
) -> ParamSchedule:
    phase2 = base.scaled({name: factors[name][0] for name in subset})
    phase3 = base.scaled({name: factors[name][1] for name in subset})
    return ParamSchedule(
        ((t0, base), (breakpoints[0], phase2), (breakpoints[1], phase3)),
        tf,
        schedule_id="scan:" + "+".join(subset),
    )


def enumerate_subsets(max_size: int = 4, names: Sequence[str] = TK_PARAM_ORDER) -> list[tuple[str, ...]]:
    """All subsets of sizes 1..max_size in ``nchoosek`` order."""
    if not 1 <= max_size <= len(names):
        raise ValueError(f"max subset size must lie in 1..{len(names)}, got {max_size!r}")
    return [combo for size in range(1, max_size + 1) for combo in itertools.combinations(names, size)]


@dataclass
class ScanResult:
    subset: tuple[str, ...]
    factors: dict[str, tuple[float, float]]
    events: list[SweepEvent] = field(default_factory=list)
    max_ratio: float = math.nan
    error: Optional[str] = None
    order: int = 0

    @property
    def sweep_detected(self) -> bool:
        return bool(self.events) and any(e.detected for e in self.events)

    def as_dict(self) -> dict:
        return {
            "subset": list(self.subset),
            "factors": {k: list(v) for k, v in self.factors.items()},
            "events": [e.as_dict() for e in self.events],
            "max_ratio": None if math.isnan(self.max_ratio) else self.max_ratio,
            "sweep_detected": self.sweep_detected,
            "error": self.error,
        }


@dataclass(frozen=True)
class ScanSetup:
    base: TkParams
    factors: dict
    breakpoints: tuple[float, float] = (1000.0, 2000.0)
    y0: tuple[float, ...] = (1.0, 0.0, 1.0)
    t_span: tuple[float, float] = (1.0, 4000.0)
    solver: SolverConfig = SolverConfig()
    grid_points: int = 4000
    sweep: SweepConfig = SweepConfig()


def run_subset(setup: ScanSetup, subset: tuple[str, ...], order: int = 0) -> ScanResult:
    factors = {name: tuple(setup.factors[name]) for name in subset}
    result = ScanResult(subset=tuple(subset), factors=factors, order=order)
    try:
        schedule = three_phase_schedule(
            setup.base, subset, setup.factors, setup.breakpoints, *setup.t_span
        )
        grid = np.linspace(setup.t_span[0], setup.t_span[1], setup.grid_points)
        traj = integrate(TK, schedule, setup.y0, setup.t_span, setup.solver, grid)
        result.events = detect_sweeps(traj, setup.breakpoints, setup.sweep)
        result.max_ratio = max(e.ratio for e in result.events)
    except (SweepdynError, ArithmeticError) as exc:
        result.error = f"{type(exc).__name__}: {exc}"
    return result


def _run_packed(args):
    return run_subset(*args)


def scan_workers(requested: Optional[int] = None) -> int:
    """Worker count, capped by ``SWEEPDYN_THREADS`` when set."""
    n = requested if requested is not None else (os.cpu_count() or 1)
    cap = os.environ.get("SWEEPDYN_THREADS")
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, n)


def scan_subsets(
    base: TkParams,
    phase_factors: dict[str, tuple[float, float]] = SCAN_FACTORS,
    breakpoints: tuple[float, float] = (1000.0, 2000.0),
    *,
    y0: Sequence[float] = (1.0, 0.0, 1.0),
    t_span: tuple[float, float] = (1.0, 4000.0),
    solver: SolverConfig = SolverConfig(),
    sweep: SweepConfig = SweepConfig(),
    grid_points: int = 4000,
    max_subset_size: int = 4,
    workers: Optional[int] = None,
) -> list[ScanResult]:
    """Run every parameter subset of size 1..max_subset_size through the
    three-regime schedule and rank the results by their largest sweep ratio.

    Failed integrations are kept as entries with ``error`` set. Ties and
    failures are ordered canonically, so the output never depends on the
    number of workers.
    """
    for name, pair in phase_factors.items():
        if any(not (math.isfinite(f) and f > 0) for f in pair):
            raise ValueError(f"phase factors for {name!r} must be positive, got {pair!r}")
    setup = ScanSetup(
        base=base,
        factors=dict(phase_factors),
        breakpoints=tuple(float(b) for b in breakpoints),
        y0=tuple(float(v) for v in y0),
        t_span=(float(t_span[0]), float(t_span[1])),
        solver=solver,
        grid_points=grid_points,
        sweep=sweep,
    )
    jobs = [(setup, subset, i) for i, subset in enumerate(enumerate_subsets(max_subset_size))]
    n = scan_workers(workers)
    if n == 1:
        results = [_run_packed(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=n) as pool:
            results = list(pool.map(_run_packed, jobs, chunksize=4))
    return rank_results(results)


def rank_results(results: Iterable[ScanResult]) -> list[ScanResult]:
    def key(r: ScanResult):
        failed = math.isnan(r.max_ratio)
        return (failed, 0.0 if failed else -r.max_ratio, r.order)

    return sorted(results, key=key)


def _fmt(v: float) -> str:
    return repr(float(v))


def scan_to_csv(results: Sequence[ScanResult], breakpoints: Sequence[float]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["rank", "subset", "size"]
    for bp in breakpoints:
        header += [f"ratio_t{bp:g}", f"detected_t{bp:g}"]
    header += ["max_ratio", "sweep_detected", "error"]
    writer.writerow(header)
    for rank, r in enumerate(results, start=1):
        row = [rank, "+".join(r.subset), len(r.subset)]
        by_bp = {e.breakpoint_time: e for e in r.events}
        for bp in breakpoints:
            e = by_bp.get(float(bp))
            row += ["" if e is None else _fmt(e.ratio), "" if e is None else str(e.detected).lower()]
        row += [
            "" if math.isnan(r.max_ratio) else _fmt(r.max_ratio),
            str(r.sweep_detected).lower(),
            r.error or "",
        ]
        writer.writerow(row)
    return buf.getvalue()
