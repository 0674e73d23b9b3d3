"""Equilibrium and stability analysis of the Turchin-Korotayev system."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from sweepdyn.errors import (
    InsufficientOscillations,
    NoInteriorEquilibrium,
    SingularCarryingCapacity,
)
from sweepdyn.model import CAPACITY_GUARD, State3, TkParams, tk_rhs
from sweepdyn.peaks import local_maxima_indices

#: Real parts within this distance of zero count as marginal.
STABILITY_TOLERANCE = 1e-9


class Classification(str, Enum):
    STABLE_NODE = "StableNode"
    STABLE_FOCUS = "StableFocus"
    UNSTABLE_SADDLE_FOCUS = "UnstableSaddleFocus"
    UNSTABLE_NODE = "UnstableNode"
    MARGINAL = "Marginal"
    DEGENERATE = "Degenerate"

    @property
    def is_unstable(self) -> bool:
        return self in (Classification.UNSTABLE_NODE, Classification.UNSTABLE_SADDLE_FOCUS)


def critical_point(p: TkParams) -> State3:
    """Interior equilibrium with ``N, W > 0`` and ``S >= 0``.

    Setting ``dS/dt = 0`` fixes the logistic factor ``1 - N/K`` at
    ``beta/rho0``; feeding that into ``dN/dt = 0`` gives
    ``W = r0*beta/(rho0*delta)``, then ``N = K (1 - beta/rho0)`` with
    ``K = kmax - c*W``, and ``dW/dt = 0`` yields ``S``.
    """
    if p.rho0 <= p.beta:
        raise NoInteriorEquilibrium(
            f"rho0={p.rho0!r} <= beta={p.beta!r}: population equilibrium collapses to N=0"
        )
    w = p.r0 * p.beta / (p.rho0 * p.delta)
    capacity = p.kmax - p.c * w
    if capacity <= 0:
        raise NoInteriorEquilibrium(f"kmax - c*W* = {capacity!r} is not positive")
    n = capacity * (1.0 - p.beta / p.rho0)
    s = (p.a * n * n - p.b * w) / p.alpha
    if s < 0:
        raise NoInteriorEquilibrium(f"S* = {s!r} is negative")
    return State3(n, s, w)


def validity_conditions(p: TkParams) -> tuple[bool, bool]:
    """The two classical side conditions on the closed-form critical point,
    evaluated verbatim as strict inequalities."""
    a, b, c, k = p.a, p.b, p.c, p.kmax
    r, rho, be, de = p.r0, p.rho0, p.beta, p.delta
    cond10 = be * de * k * rho + be * c * r * rho < c * r * be**2 + de * k * rho**2
    lhs11 = (
        2 * a * be**3 * c**2 * r**2 * rho
        + 2 * a * be**3 * c * de * k * r * rho
        + 2 * a * be * c * de * k * r * rho**3
        + 2 * a * be * de**2 * k**2 * rho**3
        + b * be * de * r * rho**3
    )
    rhs11 = (
        a * be**4 * c**2 * r**2
        + a * be**2 * c**2 * r**2 * rho**2
        + 4 * a * be**2 * c * de * k * r * rho**2
        + a * be**2 * de**2 * k**2 * rho**2
        + a * de**2 * k**2 * rho**4
    )
    return bool(cond10), bool(lhs11 < rhs11)


def jacobian_tk(p: TkParams, x: Sequence[float]) -> np.ndarray:
    N, S, W = x
    K = p.kmax - p.c * W
    if K < CAPACITY_GUARD:
        raise SingularCarryingCapacity(float(K), CAPACITY_GUARD)
    u = 1.0 - 2.0 * N / K
    dk = p.c * N * N / (K * K)
    return np.array(
        [
            [p.r0 * u - p.delta * W, 0.0, -p.r0 * dk - p.delta * N],
            [p.rho0 * u - p.beta, 0.0, -p.rho0 * dk],
            [2.0 * p.a * N, -p.alpha, -p.b],
        ]
    )


def char_poly(m) -> tuple[float, float, float, float]:
    """Coefficients ``(c3, c2, c1, c0)`` of ``det(m - lambda I)``.

    With ``c3 = -1``: ``c2 = trace``, ``c1 = -(sum of principal 2x2
    minors)`` and ``c0 = det``.
    """
    m = np.asarray(m, dtype=float)
    tr = m[0, 0] + m[1, 1] + m[2, 2]
    minors = (
        m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        + m[0, 0] * m[2, 2] - m[0, 2] * m[2, 0]
        + m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1]
    )
    det = (
        m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
        - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
        + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0])
    )
    return -1.0, float(tr), float(-minors), float(det)


def _monic(coeffs):
    c3, c2, c1, c0 = coeffs
    return c2 / c3, c1 / c3, c0 / c3


def _polish(root, b, c, d, iterations=4):
    """Newton on ``x^3 + b x^2 + c x + d``, keeping only improving updates."""
    x = root
    fx = ((x + b) * x + c) * x + d
    for _ in range(iterations):
        dfx = (3 * x + 2 * b) * x + c
        if dfx == 0:
            break
        x_new = x - fx / dfx
        f_new = ((x_new + b) * x_new + c) * x_new + d
        if abs(f_new) >= abs(fx):
            break
        x, fx = x_new, f_new
    return x


def cubic_roots(coeffs) -> list[complex]:
    """Roots of ``c3 x^3 + c2 x^2 + c1 x + c0`` by the trigonometric/Cardano
    method, Newton-polished, with complex pairs returned as exact conjugates."""
    b, c, d = _monic(coeffs)
    shift = -b / 3.0
    p = c - b * b / 3.0
    q = 2.0 * b**3 / 27.0 - b * c / 3.0 + d
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    scale = max(1.0, abs(b), abs(c) ** 0.5, abs(d) ** (1.0 / 3.0))

    if abs(p) <= 1e-14 * scale**2 and abs(q) <= 1e-14 * scale**3:
        r = _polish(shift, b, c, d)
        return [complex(r), complex(r), complex(r)]

    if disc <= 0:
        # Three real roots.
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = 3.0 * q / (p * m) if p != 0 else 0.0
        theta = math.acos(max(-1.0, min(1.0, arg))) / 3.0
        roots = [m * math.cos(theta - 2.0 * math.pi * k / 3.0) + shift for k in range(3)]
        return [complex(_polish(r, b, c, d)) for r in roots]

    # One real root; the complex pair comes from deflation so that the
    # root sum matches the trace exactly.
    sq = math.sqrt(disc)
    u = -q / 2.0 + sq if q <= 0 else -q / 2.0 - sq
    u = math.copysign(abs(u) ** (1.0 / 3.0), u)
    real = u - p / (3.0 * u) + shift if u != 0 else shift
    real = _polish(real, b, c, d)
    # x^3 + b x^2 + c x + d = (x - real)(x^2 + e x + f)
    e = b + real
    f = -d / real if abs(real) > 1e-8 * scale else c + real * e
    re = -e / 2.0
    im2 = f - re * re
    if im2 <= 0:
        s = math.sqrt(-im2)
        pair = [complex(_polish(re + s, b, c, d)), complex(_polish(re - s, b, c, d))]
        return [complex(real)] + pair
    im = math.sqrt(im2)
    return [complex(real), complex(re, -im), complex(re, im)]


def _order(eigs: list[complex]) -> list[complex]:
    return sorted(eigs, key=lambda z: (-z.real, z.imag))


def eigenvalues3(m) -> list[complex]:
    """Eigenvalues of a 3x3 matrix via its characteristic polynomial.

    Ordered by descending real part, then ascending imaginary part.
    """
    return _order(cubic_roots(char_poly(m)))


def classify(eigs: Sequence[complex], tol: float = STABILITY_TOLERANCE) -> Classification:
    eigs = [complex(z) for z in eigs]
    if all(abs(z) <= tol for z in eigs):
        return Classification.DEGENERATE
    oscillatory = any(abs(z.imag) > tol for z in eigs)
    if any(z.real > tol for z in eigs):
        return Classification.UNSTABLE_SADDLE_FOCUS if oscillatory else Classification.UNSTABLE_NODE
    if all(z.real < -tol for z in eigs):
        return Classification.STABLE_FOCUS if oscillatory else Classification.STABLE_NODE
    return Classification.MARGINAL


@dataclass
class StabilityReport:
    critical_point: State3
    jacobian: np.ndarray
    eigenvalues: list[complex]
    classification: Classification
    validity: tuple[bool, bool]
    char_poly: tuple[float, float, float, float]
    solver_stats: Optional[dict] = None
    extras: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        cp = self.critical_point
        doc = {
            "critical_point": {"N": cp.N, "S": cp.S, "W": cp.W},
            "jacobian": [[float(v) for v in row] for row in self.jacobian],
            "eigenvalues": [{"re": z.real, "im": z.imag} for z in self.eigenvalues],
            "classification": self.classification.value,
            "validity": {"condition10": self.validity[0], "condition11": self.validity[1]},
            "char_poly": list(self.char_poly),
            "solver_stats": self.solver_stats,
        }
        doc.update(self.extras)
        return doc


def stability_report(p: TkParams) -> StabilityReport:
    cp = critical_point(p)
    jac = jacobian_tk(p, cp)
    eigs = eigenvalues3(jac)
    return StabilityReport(
        critical_point=cp,
        jacobian=jac,
        eigenvalues=eigs,
        classification=classify(eigs),
        validity=validity_conditions(p),
        char_poly=char_poly(jac),
    )


def equilibrium_residual(p: TkParams, x: Sequence[float]) -> float:
    return float(np.max(np.abs(tk_rhs(x, p))))


@dataclass(frozen=True)
class LimitCycleReport:
    converged: bool
    period: float
    amplitude: float
    peak_times: tuple[float, ...]
    peak_values: tuple[float, ...]


def _relative_spread(values) -> float:
    values = np.asarray(values, dtype=float)
    mean = abs(float(np.mean(values)))
    if mean == 0:
        return math.inf
    return float(np.max(values) - np.min(values)) / mean


def limit_cycle_report(traj, component=0, tail_fraction: float = 0.5,
                       n_peaks: int = 5, tolerance: float = 0.02) -> LimitCycleReport:
    """Judge whether the tail of a trajectory has settled onto a cycle.

    Peaks of ``component`` are taken from the last ``tail_fraction`` of
    the time span. The cycle counts as converged when, over the final
    ``n_peaks`` peaks, both the peak heights and the spacings between
    them spread by less than ``tolerance`` relative to their means.
    """
    if not 0 < tail_fraction <= 1:
        raise ValueError(f"tail_fraction must lie in (0, 1], got {tail_fraction!r}")
    times = np.asarray(traj.times)
    values = np.asarray(traj.component(component))
    cut = times[-1] - tail_fraction * (times[-1] - times[0])
    keep = times >= cut
    t_tail, y_tail = times[keep], values[keep]
    if len(t_tail) < 3:
        raise InsufficientOscillations("tail window holds fewer than three samples")
    peaks = local_maxima_indices(y_tail)
    if len(peaks) < n_peaks:
        raise InsufficientOscillations(
            f"found {len(peaks)} peaks in the tail window, need {n_peaks}"
        )
    idx = peaks[-n_peaks:]
    pt = t_tail[idx]
    pv = y_tail[idx]
    spacings = np.diff(pt)
    amplitudes = [pv[k] - float(np.min(y_tail[idx[k]:idx[k + 1] + 1])) for k in range(n_peaks - 1)]
    converged = _relative_spread(pv) < tolerance and _relative_spread(spacings) < tolerance
    return LimitCycleReport(
        converged=bool(converged),
        period=float(np.mean(spacings)),
        amplitude=float(np.mean(amplitudes)),
        peak_times=tuple(float(v) for v in pt),
        peak_values=tuple(float(v) for v in pv),
    )

