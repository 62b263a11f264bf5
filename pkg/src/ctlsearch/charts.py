"""Minimal deterministic SVG line charts (no plotting dependency)."""
from __future__ import annotations

import math
from html import escape
from pathlib import Path
from typing import Mapping, Sequence

WIDTH, HEIGHT = 720, 440
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 80, 170, 40, 60
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _tick_label(v: float) -> str:
    if v == 0:
        return "0"
    if abs(v) >= 1e4 or abs(v) < 1e-3:
        return f"{v:.0e}"
    return f"{v:g}"


def _ticks(lo: float, hi: float, log: bool) -> list[float]:
    if log:
        return [10.0**e for e in range(math.floor(lo), math.ceil(hi) + 1)]
    if hi == lo:
        return [lo]
    raw = (hi - lo) / 5
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=mag * 10)
    start = math.ceil(lo / step) * step
    out = []
    v = start
    while v <= hi + step * 1e-9:
        out.append(round(v, 12))
        v += step
    return out


def line_chart(
    series: Mapping[str, Sequence[tuple[float, float]]],
    path,
    *,
    title: str = "",
    x_label: str = "",
    y_label: str = "",
    log_x: bool = False,
    log_y: bool = False,
) -> None:
    """One polyline per series. Points that cannot be drawn on a log axis are dropped."""
    if not series or not any(series.values()):
        raise ValueError("nothing to plot")

    def tx(v):
        return math.log10(v) if log_x else v

    def ty(v):
        return math.log10(v) if log_y else v

    clean: dict[str, list[tuple[float, float]]] = {}
    for name, pts in series.items():
        keep = []
        for x, y in pts:
            if x is None or y is None or not math.isfinite(x) or not math.isfinite(y):
                continue
            if (log_x and x <= 0) or (log_y and y <= 0):
                continue
            keep.append((tx(x), ty(y)))
        clean[name] = keep
    xs = [p[0] for pts in clean.values() for p in pts] or [0.0, 1.0]
    ys = [p[1] for pts in clean.values() for p in pts] or [0.0, 1.0]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 1, x_hi + 1
    if y_hi == y_lo:
        pad = 1.0 if log_y or y_lo == 0 else abs(y_lo) * 0.1
        y_lo, y_hi = y_lo - pad, y_hi + pad
    plot_w = WIDTH - MARGIN_L - MARGIN_R
    plot_h = HEIGHT - MARGIN_T - MARGIN_B

    def px(v):
        return MARGIN_L + (v - x_lo) / (x_hi - x_lo) * plot_w

    def py(v):
        return MARGIN_T + plot_h - (v - y_lo) / (y_hi - y_lo) * plot_h

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.2f}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>',
        f'<line x1="{MARGIN_L}" y1="{MARGIN_T + plot_h}" x2="{MARGIN_L + plot_w}" '
        f'y2="{MARGIN_T + plot_h}" stroke="black"/>',
        f'<line x1="{MARGIN_L}" y1="{MARGIN_T}" x2="{MARGIN_L}" y2="{MARGIN_T + plot_h}" stroke="black"/>',
    ]
    for t in _ticks(x_lo, x_hi, log_x):
        if not x_lo - 1e-12 <= t <= x_hi + 1e-12:
            continue
        label = _tick_label(10**t if log_x else t)
        out.append(
            f'<line x1="{_fmt(px(t))}" y1="{MARGIN_T + plot_h}" x2="{_fmt(px(t))}" '
            f'y2="{MARGIN_T + plot_h + 5}" stroke="black"/>'
        )
        out.append(
            f'<text x="{_fmt(px(t))}" y="{MARGIN_T + plot_h + 18}" text-anchor="middle">{label}</text>'
        )
    for t in _ticks(y_lo, y_hi, log_y):
        if not y_lo - 1e-12 <= t <= y_hi + 1e-12:
            continue
        label = _tick_label(10**t if log_y else t)
        out.append(
            f'<line x1="{MARGIN_L - 5}" y1="{_fmt(py(t))}" x2="{MARGIN_L}" y2="{_fmt(py(t))}" stroke="black"/>'
        )
        out.append(
            f'<text x="{MARGIN_L - 8}" y="{_fmt(py(t) + 4)}" text-anchor="end">{label}</text>'
        )
    x_suffix = " (log)" if log_x else ""
    y_suffix = " (log)" if log_y else ""
    out.append(
        f'<text x="{MARGIN_L + plot_w / 2:.2f}" y="{HEIGHT - 15}" text-anchor="middle">'
        f"{escape(x_label + x_suffix)}</text>"
    )
    out.append(
        f'<text x="18" y="{MARGIN_T + plot_h / 2:.2f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {MARGIN_T + plot_h / 2:.2f})">{escape(y_label + y_suffix)}</text>'
    )
    for k, (name, pts) in enumerate(clean.items()):
        color = PALETTE[k % len(PALETTE)]
        if pts:
            coords = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in pts)
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.8" points="{coords}"/>')
        ly = MARGIN_T + 10 + 20 * k
        lx = MARGIN_L + plot_w + 15
        out.append(f'<rect x="{lx}" y="{ly - 6}" width="18" height="4" fill="{color}"/>')
        out.append(f'<text x="{lx + 24}" y="{ly}">{escape(name)}</text>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n")
