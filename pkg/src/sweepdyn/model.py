"""State spaces, parameter sets, schedules and vector fields.

Two models are provided: the three-variable Turchin-Korotayev system
linking population ``N``, state resources ``S`` and internal conflict
``W``::

    dN/dt = r0 N (1 - N/(kmax - c W)) - delta N W
    dS/dt = rho0 N (1 - N/(kmax - c W)) - beta N
    dW/dt = a N^2 - b W - alpha S

and the classical Lotka-Volterra predator-prey pair ``(R, C)``. A third,
scalar ``y' = y`` model exists purely as an integrator test problem.

Parameters may change at discrete times; a :class:`ParamSchedule` maps
half-open intervals ``[t_i, t_{i+1})`` to parameter sets.
"""

from __future__ import annotations

import bisect
import dataclasses
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, NamedTuple, Sequence, Union

import numpy as np

from sweepdyn.errors import (
    InvalidParameters,
    NonFiniteState,
    OutOfSchedule,
    SingularCarryingCapacity,
)

#: Smallest admissible effective carrying capacity ``kmax - c*W``.
CAPACITY_GUARD = 1e-9


class State3(NamedTuple):
    """Population, state resources and internal conflict at one instant."""

    N: float
    S: float
    W: float


class ModelKind(str, Enum):
    TURCHIN_KOROTAYEV = "tk"
    LOTKA_VOLTERRA = "lv"
    EXPONENTIAL = "exp"


_DIMENSIONS = {
    ModelKind.TURCHIN_KOROTAYEV: 3,
    ModelKind.LOTKA_VOLTERRA: 2,
    ModelKind.EXPONENTIAL: 1,
}

_COMPONENTS = {
    ModelKind.TURCHIN_KOROTAYEV: ("N", "S", "W"),
    ModelKind.LOTKA_VOLTERRA: ("R", "C"),
    ModelKind.EXPONENTIAL: ("y",),
}


@dataclass(frozen=True)
class ModelSpec:
    kind: ModelKind
    dimension: int = 0

    def __post_init__(self):
        kind = ModelKind(self.kind)
        object.__setattr__(self, "kind", kind)
        expected = _DIMENSIONS[kind]
        if self.dimension == 0:
            object.__setattr__(self, "dimension", expected)
        elif self.dimension != expected:
            raise InvalidParameters(
                f"model {kind.value!r} has dimension {expected}, got {self.dimension}"
            )

    @property
    def components(self) -> tuple[str, ...]:
        return _COMPONENTS[self.kind]


TK = ModelSpec(ModelKind.TURCHIN_KOROTAYEV)
LV = ModelSpec(ModelKind.LOTKA_VOLTERRA)
EXP = ModelSpec(ModelKind.EXPONENTIAL)


def _check_positive(obj) -> None:
    for f in dataclasses.fields(obj):
        v = getattr(obj, f.name)
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise InvalidParameters(f"{f.name} must be a real number, got {v!r}")
        if not math.isfinite(v) or v <= 0:
            raise InvalidParameters(f"{f.name} must be finite and > 0, got {v!r}")


class _ParamsMixin:
    def as_dict(self) -> dict[str, float]:
        return {f.name: float(getattr(self, f.name)) for f in dataclasses.fields(self)}

    @classmethod
    def from_dict(cls, values: dict):
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(values) - names
        if unknown:
            raise InvalidParameters(f"unknown parameter(s): {sorted(unknown)}")
        missing = names - set(values)
        if missing:
            raise InvalidParameters(f"missing parameter(s): {sorted(missing)}")
        return cls(**{k: float(v) for k, v in values.items()})

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def scaled(self, factors: dict[str, float]):
        """Return a copy with each named parameter multiplied by its factor."""
        return self.replace(**{k: getattr(self, k) * f for k, f in factors.items()})


@dataclass(frozen=True)
class TkParams(_ParamsMixin):
    """The nine Turchin-Korotayev parameters, all strictly positive.

    Attributes:
        r0: intrinsic population growth rate.
        rho0: per-capita taxation rate.
        c: severity with which conflict shrinks the carrying capacity.
        a: rate at which encounters turn violent.
        kmax: maximum carrying capacity.
        b: conflict "forgive and forget" rate.
        beta: per-capita state expenditure rate.
        delta: severity with which conflict reduces the population.
        alpha: effectiveness of state suppression of violence.
    """

    r0: float
    rho0: float
    c: float
    a: float
    kmax: float
    b: float
    beta: float
    delta: float
    alpha: float

    def __post_init__(self):
        _check_positive(self)


@dataclass(frozen=True)
class LvParams(_ParamsMixin):
    """Prey growth ``alpha``, predation ``beta``, conversion ``gamma``,
    predator death ``delta``."""

    alpha: float
    beta: float
    gamma: float
    delta: float

    def __post_init__(self):
        _check_positive(self)


@dataclass(frozen=True)
class ExpParams(_ParamsMixin):
    """The parameterless ``y' = y`` test problem."""


ParamSet = Union[TkParams, LvParams, ExpParams]

PARAMS_FOR_KIND = {
    ModelKind.TURCHIN_KOROTAYEV: TkParams,
    ModelKind.LOTKA_VOLTERRA: LvParams,
    ModelKind.EXPONENTIAL: ExpParams,
}

#: Baseline parameter values of the Turchin-Korotayev model.
TABLE1 = TkParams(
    r0=0.015, rho0=1.0, c=2.0, a=0.01, kmax=3.0, b=0.05, beta=0.25, delta=0.1, alpha=0.1
)

#: Parameter order used to enumerate subsets in the scan.
TK_PARAM_ORDER = ("a", "b", "c", "kmax", "r0", "alpha", "beta", "delta", "rho0")


@dataclass(frozen=True)
class ParamSchedule:
    """Piecewise-constant parameters on half-open intervals.

    ``segments[i] = (t_i, params_i)`` applies on ``[t_i, t_{i+1})``; the
    last segment runs through ``horizon_end`` inclusive.
    """

    segments: tuple[tuple[float, ParamSet], ...]
    horizon_end: float
    schedule_id: str = ""

    def __post_init__(self):
        segs = tuple((float(t), p) for t, p in self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs:
            raise InvalidParameters("schedule needs at least one segment")
        kinds = {type(p) for _, p in segs}
        if len(kinds) != 1:
            raise InvalidParameters("all schedule segments must share a model kind")
        starts = [t for t, _ in segs]
        if any(not math.isfinite(t) for t in starts):
            raise InvalidParameters("segment start times must be finite")
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise InvalidParameters("segment start times must be strictly increasing")
        if not self.horizon_end >= starts[-1]:
            raise InvalidParameters("horizon_end precedes the last segment start")

    @classmethod
    def constant(cls, params: ParamSet, t0: float, tf: float, schedule_id: str = ""):
        return cls(((t0, params),), tf, schedule_id)

    @property
    def start(self) -> float:
        return self.segments[0][0]

    @property
    def starts(self) -> list[float]:
        return [t for t, _ in self.segments]

    @property
    def breakpoints(self) -> list[float]:
        return self.starts[1:]

    @property
    def params_type(self) -> type:
        return type(self.segments[0][1])

    def segment_index(self, t: float) -> int:
        if not (self.start <= t <= self.horizon_end):
            raise OutOfSchedule(
                f"t={t!r} outside schedule coverage [{self.start!r}, {self.horizon_end!r}]"
            )
        return bisect.bisect_right(self.starts, t) - 1


def params_at(schedule: ParamSchedule, t: float) -> ParamSet:
    """Parameters in force at ``t``; at a breakpoint the new segment applies."""
    return schedule.segments[schedule.segment_index(t)][1]


def _floats(state):
    # Python floats are much cheaper than numpy scalars in these short formulas.
    return state.tolist() if isinstance(state, np.ndarray) else state


def tk_rhs(state: Sequence[float], p: TkParams) -> np.ndarray:
    N, S, W = _floats(state)
    K = p.kmax - p.c * W
    if K < CAPACITY_GUARD:
        raise SingularCarryingCapacity(float(K), CAPACITY_GUARD)
    logistic = N * (1.0 - N / K)
    return np.array(
        [
            p.r0 * logistic - p.delta * N * W,
            p.rho0 * logistic - p.beta * N,
            p.a * N * N - p.b * W - p.alpha * S,
        ]
    )


def lv_rhs(state: Sequence[float], p: LvParams) -> np.ndarray:
    R, C = _floats(state)
    if not (math.isfinite(R) and math.isfinite(C)):
        raise NonFiniteState(f"non-finite Lotka-Volterra state ({R!r}, {C!r})")
    return np.array([p.alpha * R - p.beta * R * C, p.gamma * C * R - p.delta * C])


def exp_rhs(y):
    return y


def lv_first_integral(state: Sequence[float], p: LvParams) -> float:
    """``gamma R - delta ln R + beta C - alpha ln C``, constant along orbits."""
    R, C = state
    return p.gamma * R - p.delta * math.log(R) + p.beta * C - p.alpha * math.log(C)


def _exp_field(y, p):
    return np.array(y, dtype=float)


_FIELDS: dict[ModelKind, Callable] = {
    ModelKind.TURCHIN_KOROTAYEV: tk_rhs,
    ModelKind.LOTKA_VOLTERRA: lv_rhs,
    ModelKind.EXPONENTIAL: _exp_field,
}


def vector_field(model: ModelSpec) -> Callable[[np.ndarray, ParamSet], np.ndarray]:
    """The ``(state, params) -> derivative`` function for ``model``."""
    return _FIELDS[model.kind]
