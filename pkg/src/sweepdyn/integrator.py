"""Adaptive Dormand-Prince 5(4) integration of schedule-switched fields.

Integration proceeds segment by segment through a :class:`ParamSchedule`.
Each segment starts with a fresh step-size estimate and ends exactly on
its breakpoint, so parameter jumps never fall inside a step.

Components flagged in the nonnegative mask are kept at or above zero the
way Matlab's ``NonNegative`` option does it: a flagged component sitting
at or below zero may not have a negative derivative, a step whose result
dips further below zero than the tolerance allows is rejected, and any
residual negative value of an accepted step is projected to zero (with
the derivative re-evaluated at the projected state).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from sweepdyn.errors import (
    InvalidParameters,
    NonFiniteState,
    SingularCarryingCapacity,
    StepBudgetExceeded,
    StepUnderflow,
)
from sweepdyn.model import PARAMS_FOR_KIND, ModelSpec, ParamSchedule, vector_field

# Dormand-Prince tableau.
C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
# Fifth-order minus embedded fourth-order weights.
E1, E3, E4, E5, E6, E7 = (
    71 / 57600,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0

Rhs = Callable[[float, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and step controls.

    ``h_max=None`` means one tenth of the integration span. A ``None``
    mask selects the model default (every component nonnegative for the
    population models). ``fixed_step`` switches off error control and
    takes uniform steps no longer than the given size.
    """

    rel_tol: float = 1e-6
    abs_tol: float = 1e-10
    h_init: Optional[float] = None
    h_min: float = 1e-12
    h_max: Optional[float] = None
    nonnegative_mask: Optional[tuple[bool, ...]] = None
    max_steps: int = 1_000_000
    fixed_step: Optional[float] = None

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "h_min"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise InvalidParameters(f"{name} must be finite and > 0, got {v!r}")
        for name in ("h_init", "h_max", "fixed_step"):
            v = getattr(self, name)
            if v is not None and not (math.isfinite(v) and v > 0):
                raise InvalidParameters(f"{name} must be finite and > 0, got {v!r}")
        if self.h_max is not None and self.h_min > self.h_max:
            raise InvalidParameters("h_min must not exceed h_max")
        if not (isinstance(self.max_steps, int) and self.max_steps > 0):
            raise InvalidParameters(f"max_steps must be a positive integer, got {self.max_steps!r}")
        if self.nonnegative_mask is not None:
            object.__setattr__(self, "nonnegative_mask", tuple(bool(m) for m in self.nonnegative_mask))


@dataclass(frozen=True)
class SolverStats:
    steps_accepted: int = 0
    steps_rejected: int = 0
    rhs_evaluations: int = 0

    def as_dict(self) -> dict[str, int]:
        return {
            "steps_accepted": self.steps_accepted,
            "steps_rejected": self.steps_rejected,
            "rhs_evaluations": self.rhs_evaluations,
        }


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    model: ModelSpec
    schedule_id: str = ""
    stats: SolverStats = field(default_factory=SolverStats)
    breakpoints: tuple[float, ...] = ()

    def __len__(self) -> int:
        return len(self.times)

    def component(self, which) -> np.ndarray:
        """One state component by index or name (``"N"``, ``"R"``, ...)."""
        if isinstance(which, str):
            which = self.model.components.index(which)
        return self.states[:, which]


def error_norm(err: np.ndarray, y: np.ndarray, y_new: np.ndarray, cfg: SolverConfig) -> float:
    """Largest ratio of local error to ``abs_tol + rel_tol*|y|``."""
    scale = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
    return float(np.max(np.abs(err) / scale))


def _suggest(h: float, err: float) -> float:
    if err == 0.0:
        return h * MAX_FACTOR
    return h * min(MAX_FACTOR, max(MIN_FACTOR, SAFETY * err ** -0.2))


_A = tuple(
    np.array(row)
    for row in (
        (A21,),
        (A31, A32),
        (A41, A42, A43),
        (A51, A52, A53, A54),
        (A61, A62, A63, A64, A65),
    )
)
_B = np.array([B1, 0.0, B3, B4, B5, B6])
_E = np.array([E1, 0.0, E3, E4, E5, E6, E7])
_C = (C2, C3, C4, C5, 1.0)


def _dopri(fun: Rhs, t: float, y: np.ndarray, f0: np.ndarray, h: float):
    k = np.empty((7, y.size))
    k[0] = f0
    for i, (row, c) in enumerate(zip(_A, _C), start=1):
        k[i] = fun(t + c * h, y + h * (row @ k[:i]))
    y_new = y + h * (_B @ k[:6])
    k[6] = fun(t + h, y_new)
    return y_new, k[6].copy(), h * (_E @ k)


def step(rhs: Rhs, t: float, y, h: float, cfg: SolverConfig = SolverConfig()):
    """One embedded 5(4) step of ``y' = rhs(t, y)``.

    Returns ``(y_next, error_estimate, h_suggest)`` where the error
    estimate is the componentwise difference between the fifth- and
    fourth-order solutions.
    """
    if not h > 0:
        raise ValueError(f"step size must be positive, got {h!r}")

    def fun(tt, yy):
        return np.asarray(rhs(tt, yy), dtype=float)

    y = np.atleast_1d(np.asarray(y, dtype=float))
    with np.errstate(invalid="ignore", over="ignore"):
        y_next, _, err = _dopri(fun, t, y, fun(t, y), h)
    if not (np.all(np.isfinite(y_next)) and np.all(np.isfinite(err))):
        raise NonFiniteState(f"non-finite stage value in step from t={t!r} with h={h!r}")
    return y_next, err, _suggest(h, error_norm(err, y, y_next, cfg))


def _initial_step(fun: Rhs, t0: float, y0: np.ndarray, f0: np.ndarray, cfg: SolverConfig, span: float) -> float:
    scale = cfg.abs_tol + cfg.rel_tol * np.abs(y0)
    d0 = float(np.sqrt(np.mean((y0 / scale) ** 2)))
    d1 = float(np.sqrt(np.mean((f0 / scale) ** 2)))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, span)
    try:
        f1 = fun(t0 + h0, y0 + h0 * f0)
    except SingularCarryingCapacity:
        return h0
    d2 = float(np.sqrt(np.mean(((f1 - f0) / scale) ** 2))) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, span)


class _Counter:
    __slots__ = ("evals",)

    def __init__(self):
        self.evals = 0


def _make_fun(field_fn, params, mask: Optional[np.ndarray], counter: _Counter) -> Rhs:
    if mask is None:

        def fun(t, y):
            counter.evals += 1
            return field_fn(y, params)

    else:

        def fun(t, y):
            counter.evals += 1
            f = field_fn(y, params)
            if y.min() <= 0.0:
                f[mask & (y <= 0.0) & (f < 0.0)] = 0.0
            return f

    return fun


def _default_mask(model: ModelSpec) -> tuple[bool, ...]:
    if model.kind.value == "exp":
        return (False,)
    return (True,) * model.dimension


def integrate(
    model: ModelSpec,
    schedule: ParamSchedule,
    y0: Sequence[float],
    t_span: tuple[float, float],
    cfg: SolverConfig = SolverConfig(),
    output_grid: Optional[Sequence[float]] = None,
) -> Trajectory:
    """Integrate ``model`` under ``schedule`` from ``y0`` over ``t_span``.

    Without ``output_grid`` the trajectory holds every accepted step;
    otherwise it is sampled on the grid by cubic Hermite interpolation.
    """
    t0, tf = float(t_span[0]), float(t_span[1])
    if not t0 < tf:
        raise InvalidParameters(f"t_span must satisfy t0 < tf, got {t_span!r}")
    if not issubclass(schedule.params_type, _params_type(model)):
        raise InvalidParameters("schedule parameters do not match the model kind")
    if schedule.start > t0 or schedule.horizon_end < tf:
        raise InvalidParameters(
            f"schedule covers [{schedule.start}, {schedule.horizon_end}], not {t_span!r}"
        )
    y = np.array(y0, dtype=float).reshape(-1)
    if y.shape != (model.dimension,):
        raise InvalidParameters(f"initial state must have {model.dimension} components")
    if not np.all(np.isfinite(y)):
        raise InvalidParameters("initial state must be finite")

    mask_t = cfg.nonnegative_mask if cfg.nonnegative_mask is not None else _default_mask(model)
    if len(mask_t) != model.dimension:
        raise InvalidParameters("nonnegative_mask length does not match the model dimension")
    mask = np.array(mask_t, dtype=bool) if any(mask_t) else None
    if mask is not None and np.any(y[mask] < 0):
        raise InvalidParameters("initial state violates the nonnegative mask")

    grid = None
    if output_grid is not None:
        grid = np.asarray(output_grid, dtype=float)
        if grid.ndim != 1 or len(grid) == 0:
            raise InvalidParameters("output_grid must be a non-empty 1-D sequence")
        if np.any(np.diff(grid) <= 0):
            raise InvalidParameters("output_grid must be strictly increasing")
        if grid[0] < t0 or grid[-1] > tf:
            raise InvalidParameters("output_grid must lie within t_span")

    field_fn = vector_field(model)
    h_max = cfg.h_max if cfg.h_max is not None else 0.1 * (tf - t0)
    counter = _Counter()
    accepted = rejected = 0

    out_t: list[float] = []
    out_y: list[np.ndarray] = []
    gi = 0
    if grid is None:
        out_t.append(t0)
        out_y.append(y.copy())
    else:
        while gi < len(grid) and grid[gi] == t0:
            out_t.append(t0)
            out_y.append(y.copy())
            gi += 1

    bounds = [t0] + [b for b in schedule.breakpoints if t0 < b < tf] + [tf]
    t = t0
    for a, b in zip(bounds, bounds[1:]):
        params = schedule.segments[schedule.segment_index(a)][1]
        fun = _make_fun(field_fn, params, mask, counter)
        f = fun(t, y)
        if cfg.fixed_step is not None:
            n = max(1, math.ceil((b - a) / cfg.fixed_step - 1e-9))
            h = (b - a) / n
        elif cfg.h_init is not None:
            h = cfg.h_init
        else:
            h = _initial_step(fun, t, y, f, cfg, b - a)
        h = min(h, h_max)
        last_singular: Optional[SingularCarryingCapacity] = None
        just_rejected = False

        while t < b:
            if accepted + rejected >= cfg.max_steps:
                raise StepBudgetExceeded(f"step budget of {cfg.max_steps} exhausted at t={t!r}")
            final = t + h * 1.000001 >= b
            if final:
                h = b - t
            if h < cfg.h_min or t + h == t:
                if last_singular is not None:
                    raise last_singular
                raise StepUnderflow(f"step size {h!r} below h_min at t={t!r}")

            try:
                y_new, f_new, err_vec = _dopri(fun, t, y, f, h)
            except SingularCarryingCapacity as exc:
                last_singular = exc
                rejected += 1
                h *= MIN_FACTOR
                just_rejected = True
                continue

            if cfg.fixed_step is not None:
                err = 0.0
                if not np.all(np.isfinite(y_new)):
                    raise NonFiniteState(f"non-finite state at t={t + h!r}")
            else:
                err = error_norm(err_vec, y, y_new, cfg)
                if not math.isfinite(err) or not np.all(np.isfinite(y_new)):
                    err = math.inf
                elif mask is not None and err <= 1.0:
                    dip = y_new[mask]
                    if np.any(dip < 0):
                        scale = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(y[mask]), np.abs(dip))
                        err = max(err, float(np.max(-dip / scale)))
                if err > 1.0:
                    rejected += 1
                    h = h * (MIN_FACTOR if math.isinf(err) else max(MIN_FACTOR, SAFETY * err ** -0.2))
                    just_rejected = True
                    continue

            t_new = b if final else t + h
            if mask is not None:
                low = mask & (y_new < 0)
                if low.any():
                    y_new[low] = 0.0
                    f_new = fun(t_new, y_new)
            accepted += 1
            last_singular = None

            if grid is None:
                out_t.append(t_new)
                out_y.append(y_new.copy())
            else:
                while gi < len(grid) and grid[gi] <= t_new:
                    s = (grid[gi] - t) / h
                    s2, s3 = s * s, s * s * s
                    v = (
                        (2 * s3 - 3 * s2 + 1) * y
                        + (s3 - 2 * s2 + s) * h * f
                        + (-2 * s3 + 3 * s2) * y_new
                        + (s3 - s2) * h * f_new
                    )
                    if mask is not None:
                        v = np.where(mask & (v < 0), 0.0, v)
                    out_t.append(float(grid[gi]))
                    out_y.append(v)
                    gi += 1

            t, y, f = t_new, y_new, f_new
            if cfg.fixed_step is None:
                grown = _suggest(h, err)
                if just_rejected:
                    grown = min(grown, h)
                h = min(grown, h_max)
            just_rejected = False

    return Trajectory(
        times=np.array(out_t),
        states=np.array(out_y).reshape(len(out_t), model.dimension),
        model=model,
        schedule_id=schedule.schedule_id,
        stats=SolverStats(accepted, rejected, counter.evals),
        breakpoints=tuple(bp for bp in schedule.breakpoints if t0 < bp < tf),
    )


def _params_type(model: ModelSpec) -> type:
    return PARAMS_FOR_KIND[model.kind]


def uniform_grid(t0: float, tf: float, num: int) -> np.ndarray:
    return np.linspace(t0, tf, num)
