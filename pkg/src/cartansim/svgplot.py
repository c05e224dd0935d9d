"""Minimal SVG line plots: axes, ticks, one polyline per series.

Enough to reproduce the package's figures (error curves, cost traces,
slope fits) without pulling in a plotting stack.  Output is a plain SVG
string; pass a path to also write it to disk.
"""

from __future__ import annotations

import math
from typing import Sequence

from .errors import ConfigError

_PALETTE = ("#1f6fb2", "#d1495b", "#3e8e5a", "#8e6bb2", "#c98a22", "#4a4a4a")

_W, _H = 640, 420
_ML, _MR, _MT, _MB = 72, 20, 34, 52  # margins: left, right, top, bottom


def _nice_ticks(lo: float, hi: float, want: int = 6) -> list[float]:
    """Round tick positions covering [lo, hi] at a 1/2/5 step."""
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(want - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


def _fmt(value: float) -> str:
    if value == 0.0:
        return "0"
    if abs(value) >= 1e4 or abs(value) < 1e-3:
        return f"{value:.0e}"
    return f"{value:g}"


def line_plot(
    series: Sequence[tuple[str, Sequence[float], Sequence[float]]],
    path: str | None = None,
    *,
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
    logy: bool = False,
) -> str:
    """Render (name, xs, ys) series to an SVG document string.

    With logy, points at y <= 0 are dropped from the plot (they have no
    log-scale position); a series whose points all vanish keeps a legend
    entry so the reader can see it sat at zero.
    """
    if not series:
        raise ConfigError("nothing to plot: empty series list")
    cleaned = []
    for name, xs, ys in series:
        if len(xs) != len(ys):
            raise ConfigError(f"series {name!r} has {len(xs)} x values but {len(ys)} y values")
        pts = [(float(x), float(y)) for x, y in zip(xs, ys) if not logy or y > 0.0]
        cleaned.append((str(name), pts))

    drawable = [pts for _, pts in cleaned if pts]
    all_x = [x for pts in drawable for x, _ in pts]
    all_y = [y for pts in drawable for _, y in pts]
    if not all_x:
        all_x, all_y = [0.0, 1.0], [1.0, 1.0] if logy else [0.0, 1.0]
    x_lo, x_hi = min(all_x), max(all_x)
    y_lo, y_hi = min(all_y), max(all_y)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if logy:
        ly_lo, ly_hi = math.log10(y_lo), math.log10(y_hi)
        if ly_hi - ly_lo < 0.5:
            ly_lo, ly_hi = ly_lo - 0.5, ly_hi + 0.5
        y_ticks = [10.0**e for e in range(math.ceil(ly_lo - 1e-9), math.floor(ly_hi + 1e-9) + 1)]
    else:
        if y_hi == y_lo:
            y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
        y_ticks = _nice_ticks(y_lo, y_hi)
        y_lo, y_hi = min(y_lo, y_ticks[0]), max(y_hi, y_ticks[-1])
    x_ticks = _nice_ticks(x_lo, x_hi)
    x_lo, x_hi = min(x_lo, x_ticks[0]), max(x_hi, x_ticks[-1])

    px_w, px_h = _W - _ML - _MR, _H - _MT - _MB

    def sx(x: float) -> float:
        return _ML + (x - x_lo) / (x_hi - x_lo) * px_w

    def sy(y: float) -> float:
        if logy:
            fr = (math.log10(y) - ly_lo) / max(ly_hi - ly_lo, 1e-12)
        else:
            fr = (y - y_lo) / max(y_hi - y_lo, 1e-12)
        return _MT + (1.0 - fr) * px_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<rect x="{_ML}" y="{_MT}" width="{px_w}" height="{px_h}" fill="none" stroke="#888"/>',
    ]
    if title:
        parts.append(f'<text x="{_W / 2:.1f}" y="20" text-anchor="middle" font-size="14">{_esc(title)}</text>')
    for t in x_ticks:
        x = sx(t)
        parts.append(f'<line x1="{x:.1f}" y1="{_MT + px_h}" x2="{x:.1f}" y2="{_MT + px_h + 4}" stroke="#888"/>')
        parts.append(f'<text x="{x:.1f}" y="{_MT + px_h + 17}" text-anchor="middle">{_fmt(t)}</text>')
    for t in y_ticks:
        y = sy(t)
        parts.append(f'<line x1="{_ML - 4}" y1="{y:.1f}" x2="{_ML}" y2="{y:.1f}" stroke="#888"/>')
        parts.append(f'<text x="{_ML - 7}" y="{y + 4:.1f}" text-anchor="end">{_fmt(t)}</text>')
        parts.append(
            f'<line x1="{_ML}" y1="{y:.1f}" x2="{_ML + px_w}" y2="{y:.1f}" stroke="#eee"/>'
        )
    if xlabel:
        parts.append(
            f'<text x="{_ML + px_w / 2:.1f}" y="{_H - 12}" text-anchor="middle">{_esc(xlabel)}</text>'
        )
    if ylabel:
        cy = _MT + px_h / 2
        parts.append(
            f'<text x="18" y="{cy:.1f}" text-anchor="middle" transform="rotate(-90 18 {cy:.1f})">{_esc(ylabel)}</text>'
        )
    for i, (name, pts) in enumerate(cleaned):
        color = _PALETTE[i % len(_PALETTE)]
        if pts:
            coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
            parts.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        lx, ly_ = _ML + px_w - 150, _MT + 14 + 16 * i
        parts.append(f'<line x1="{lx}" y1="{ly_ - 4}" x2="{lx + 18}" y2="{ly_ - 4}" stroke="{color}" stroke-width="1.5"/>')
        parts.append(f'<text x="{lx + 24}" y="{ly_}">{_esc(name)}</text>')
    parts.append("</svg>")
    svg = "\n".join(parts)
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(svg)
    return svg


def _esc(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
