"""Minimal SVG line plots: axes, ticks, polylines and a legend."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")
DASHES = ("", "6,3", "2,2", "8,3,2,3")
MAX_POINTS = 6000


@dataclass
class Series:
    label: str
    x: np.ndarray
    y: np.ndarray
    secondary: bool = False


def nice_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if not (math.isfinite(lo) and math.isfinite(hi)):
        return []
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    first = math.ceil(lo / step) * step
    ticks = []
    v = first
    while v <= hi + 1e-9 * step:
        ticks.append(round(v, 12))
        v += step
    return ticks


def _range(values: Sequence[np.ndarray]) -> tuple[float, float]:
    lo = min(float(np.min(v)) for v in values)
    hi = max(float(np.max(v)) for v in values)
    if hi == lo:
        pad = abs(lo) * 0.05 or 1.0
        return lo - pad, hi + pad
    pad = 0.04 * (hi - lo)
    return lo - pad, hi + pad


def _thin(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    stride = max(1, math.ceil(len(x) / MAX_POINTS))
    if stride == 1:
        return x, y
    return np.append(x[::stride], x[-1]), np.append(y[::stride], y[-1])


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def line_plot(
    series: Sequence[Series],
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
    ylabel_right: str = "",
    vlines: Sequence[float] = (),
    width: int = 900,
    height: int = 520,
) -> str:
    """Render series as polylines; ``secondary`` series use a right axis."""
    left, right, top, bottom = 80, 80 if any(s.secondary for s in series) else 30, 60, 60
    pw, ph = width - left - right, height - top - bottom
    primary = [s for s in series if not s.secondary]
    secondary = [s for s in series if s.secondary]
    x_lo, x_hi = _range([s.x for s in series])
    axes = {False: _range([s.y for s in primary]) if primary else (0.0, 1.0)}
    if secondary:
        axes[True] = _range([s.y for s in secondary])

    def px(x):
        return left + (x - x_lo) / (x_hi - x_lo) * pw

    def py(y, sec=False):
        lo, hi = axes[sec]
        return top + ph - (y - lo) / (hi - lo) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    if title:
        out.append(f'<text x="{width / 2}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>')
    for t in nice_ticks(x_lo, x_hi):
        x = px(t)
        out.append(f'<line x1="{x:.2f}" y1="{top + ph}" x2="{x:.2f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{x:.2f}" y="{top + ph + 18}" text-anchor="middle">{_fmt(t)}</text>')
    for sec, anchor, x0, dx in ((False, "end", left, -5), (True, "start", left + pw, 5)):
        if sec not in axes:
            continue
        for t in nice_ticks(*axes[sec]):
            y = py(t, sec)
            out.append(f'<line x1="{x0}" y1="{y:.2f}" x2="{x0 + dx}" y2="{y:.2f}" stroke="black"/>')
            out.append(f'<text x="{x0 + 2 * dx}" y="{y + 4:.2f}" text-anchor="{anchor}">{_fmt(t)}</text>')
    if xlabel:
        out.append(f'<text x="{left + pw / 2}" y="{height - 15}" text-anchor="middle">{escape(xlabel)}</text>')
    if ylabel:
        out.append(
            f'<text x="18" y="{top + ph / 2}" text-anchor="middle" '
            f'transform="rotate(-90 18 {top + ph / 2})">{escape(ylabel)}</text>'
        )
    if ylabel_right and secondary:
        xr = width - 15
        out.append(
            f'<text x="{xr}" y="{top + ph / 2}" text-anchor="middle" '
            f'transform="rotate(90 {xr} {top + ph / 2})">{escape(ylabel_right)}</text>'
        )
    for v in vlines:
        if x_lo <= v <= x_hi:
            x = px(v)
            out.append(
                f'<line x1="{x:.2f}" y1="{top}" x2="{x:.2f}" y2="{top + ph}" '
                f'stroke="#888" stroke-dasharray="3,3"/>'
            )
    for i, s in enumerate(series):
        xs, ys = _thin(np.asarray(s.x, float), np.asarray(s.y, float))
        pts = " ".join(f"{px(a):.2f},{py(b, s.secondary):.2f}" for a, b in zip(xs, ys))
        dash = DASHES[i % len(DASHES)]
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(
            f'<polyline fill="none" stroke="{PALETTE[i % len(PALETTE)]}" stroke-width="1.3"'
            f'{dash_attr} points="{pts}"/>'
        )
    # Legend above the plot area.
    lx = left
    for i, s in enumerate(series):
        label = s.label + (" (right axis)" if s.secondary else "")
        out.append(
            f'<line x1="{lx}" y1="{top - 14}" x2="{lx + 24}" y2="{top - 14}" '
            f'stroke="{PALETTE[i % len(PALETTE)]}" stroke-width="2"/>'
        )
        out.append(f'<text x="{lx + 30}" y="{top - 10}">{escape(label)}</text>')
        lx += 40 + 7 * len(label)
    out.append("</svg>")
    return "\n".join(out) + "\n"
