"""Minimal static SVG line plots (polylines, axes, legend)."""

from __future__ import annotations

import numpy as np

__all__ = ["write_line_plot"]

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")
_W, _H = 860, 460
_ML, _MR, _MT, _MB = 64, 16, 34, 46
_MAX_POINTS = 2000


def _ticks(lo: float, hi: float, count: int = 6) -> np.ndarray:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / count
    mag = 10.0 ** np.floor(np.log10(raw))
    step = min(s for s in (1 * mag, 2 * mag, 5 * mag, 10 * mag) if s >= raw)
    start = np.ceil(lo / step) * step
    return np.arange(start, hi + 0.5 * step, step)


def write_line_plot(path, t, series, title: str = "", xlabel: str = "t",
                    ylabel: str = "") -> None:
    """Write a static SVG with one polyline per (label, values) pair."""
    t = np.asarray(t, dtype=float)
    series = [(label, np.asarray(v, dtype=float)) for label, v in series]
    stride = max(1, t.size // _MAX_POINTS)
    td = t[::stride]
    data = [(label, v[::stride]) for label, v in series]

    ymin = min(float(np.min(v)) for _, v in data)
    ymax = max(float(np.max(v)) for _, v in data)
    if ymax - ymin < 1e-12:
        ymin, ymax = ymin - 1.0, ymax + 1.0
    pad = 0.05 * (ymax - ymin)
    ymin, ymax = ymin - pad, ymax + pad
    x0, x1 = float(td[0]), float(td[-1])

    pw = _W - _ML - _MR
    ph = _H - _MT - _MB

    def px(x):
        return _ML + pw * (x - x0) / (x1 - x0)

    def py(y):
        return _MT + ph * (1.0 - (y - ymin) / (ymax - ymin))

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
           f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">',
           f'<rect width="{_W}" height="{_H}" fill="white"/>']
    if title:
        out.append(f'<text x="{_W / 2:.0f}" y="20" text-anchor="middle" '
                   f'font-size="14">{title}</text>')

    for xv in _ticks(x0, x1):
        X = px(xv)
        out.append(f'<line x1="{X:.1f}" y1="{_MT}" x2="{X:.1f}" y2="{_MT + ph}" '
                   f'stroke="#dddddd"/>')
        out.append(f'<text x="{X:.1f}" y="{_MT + ph + 16}" text-anchor="middle">'
                   f'{xv:g}</text>')
    for yv in _ticks(ymin, ymax):
        Y = py(yv)
        out.append(f'<line x1="{_ML}" y1="{Y:.1f}" x2="{_ML + pw}" y2="{Y:.1f}" '
                   f'stroke="#dddddd"/>')
        out.append(f'<text x="{_ML - 6}" y="{Y + 4:.1f}" text-anchor="end">'
                   f'{yv:g}</text>')
    out.append(f'<rect x="{_ML}" y="{_MT}" width="{pw}" height="{ph}" '
               f'fill="none" stroke="#333333"/>')
    out.append(f'<text x="{_ML + pw / 2:.0f}" y="{_H - 8}" text-anchor="middle">'
               f'{xlabel}</text>')
    if ylabel:
        out.append(f'<text x="16" y="{_MT + ph / 2:.0f}" text-anchor="middle" '
                   f'transform="rotate(-90 16 {_MT + ph / 2:.0f})">{ylabel}</text>')

    for i, (label, v) in enumerate(data):
        color = _COLORS[i % len(_COLORS)]
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(td, v))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                   f'stroke-width="1.4"/>')
        lx = _ML + pw - 130
        ly = _MT + 16 + 18 * i
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 28}" y="{ly}">{label}</text>')

    out.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(out) + "\n")
