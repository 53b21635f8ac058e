"""Minimal static SVG line plots, no plotting library.

Produces a fixed 800x600 SVG 1.1 document with axes, tick labels, a small
legend and up to a handful of polylines. Line styles follow the plotting
conventions used elsewhere in the package: dotted for empirical curves,
solid for model curves, dash-dotted for the baseline.
"""

from __future__ import annotations

import numpy as np

WIDTH = 800
HEIGHT = 600
MARGIN_LEFT = 72
MARGIN_RIGHT = 24
MARGIN_TOP = 44
MARGIN_BOTTOM = 56

_DASHES = {
    "solid": None,
    "dotted": "2,5",
    "dashdot": "9,4,2,4",
    "points": None,
}

_COLORS = ("#1f4e79", "#b03030", "#3a7d3a", "#7a5c9e", "#806020")


def _ticks(lo: float, hi: float, count: int = 6) -> np.ndarray:
    if hi <= lo:
        hi = lo + 1.0
    return np.linspace(lo, hi, count)


def _fmt(value: float) -> str:
    return f"{value:.4g}"


def line_plot(curves, title: str = "", x_label: str = "", y_label: str = "") -> str:
    """Render curves as an SVG document string.

    ``curves`` is a sequence of (label, x, y, style) tuples with style one of
    "solid", "dotted" or "dashdot". Non-finite points break the polyline.
    """
    if not curves:
        raise ValueError("need at least one curve")
    xs = np.concatenate([np.asarray(c[1], dtype=np.float64) for c in curves])
    ys = np.concatenate([np.asarray(c[2], dtype=np.float64) for c in curves])
    finite_x = xs[np.isfinite(xs)]
    finite_y = ys[np.isfinite(ys)]
    if finite_x.size == 0 or finite_y.size == 0:
        raise ValueError("no finite points to plot")
    x_lo, x_hi = float(finite_x.min()), float(finite_x.max())
    y_lo, y_hi = float(finite_y.min()), float(finite_y.max())
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 1.0, x_hi + 1.0
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
    pad = 0.04 * (y_hi - y_lo)
    y_lo -= pad
    y_hi += pad

    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def px(x: float) -> float:
        return MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y: float) -> float:
        return MARGIN_TOP + (y_hi - y) / (y_hi - y_lo) * plot_h

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="13">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="#333" stroke-width="1"/>',
    ]
    if title:
        parts.append(
            f'<text x="{WIDTH / 2:.1f}" y="{MARGIN_TOP - 16}" text-anchor="middle" '
            f'font-size="16">{_escape(title)}</text>'
        )

    for tick in _ticks(x_lo, x_hi):
        x = px(tick)
        parts.append(
            f'<line x1="{x:.2f}" y1="{MARGIN_TOP + plot_h}" x2="{x:.2f}" '
            f'y2="{MARGIN_TOP + plot_h + 5}" stroke="#333"/>'
        )
        parts.append(
            f'<text x="{x:.2f}" y="{MARGIN_TOP + plot_h + 20}" text-anchor="middle">'
            f'{_fmt(tick)}</text>'
        )
    for tick in _ticks(y_lo, y_hi):
        y = py(tick)
        parts.append(
            f'<line x1="{MARGIN_LEFT - 5}" y1="{y:.2f}" x2="{MARGIN_LEFT}" y2="{y:.2f}" '
            'stroke="#333"/>'
        )
        parts.append(
            f'<text x="{MARGIN_LEFT - 9}" y="{y + 4:.2f}" text-anchor="end">{_fmt(tick)}</text>'
        )
    if x_label:
        parts.append(
            f'<text x="{MARGIN_LEFT + plot_w / 2:.1f}" y="{HEIGHT - 14}" '
            f'text-anchor="middle">{_escape(x_label)}</text>'
        )
    if y_label:
        cy = MARGIN_TOP + plot_h / 2
        parts.append(
            f'<text x="18" y="{cy:.1f}" text-anchor="middle" '
            f'transform="rotate(-90 18 {cy:.1f})">{_escape(y_label)}</text>'
        )

    for idx, (label, x, y, style) in enumerate(curves):
        if style not in _DASHES:
            raise ValueError(f"unknown line style {style!r}")
        color = _COLORS[idx % len(_COLORS)]
        dash = _DASHES[style]
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if style == "points":
            ok = np.isfinite(x) & np.isfinite(y)
            for a, b in zip(x[ok], y[ok]):
                parts.append(
                    f'<circle cx="{px(a):.2f}" cy="{py(b):.2f}" r="2" fill="{color}"/>'
                )
        else:
            for seg_x, seg_y in _finite_segments(x, y):
                points = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(seg_x, seg_y))
                parts.append(
                    f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash_attr} '
                    f'points="{points}"/>'
                )
        ly = MARGIN_TOP + 16 + 18 * idx
        lx = WIDTH - MARGIN_RIGHT - 160
        if style == "points":
            parts.append(f'<circle cx="{lx + 14}" cy="{ly - 4}" r="2" fill="{color}"/>')
        else:
            parts.append(
                f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 28}" y2="{ly - 4}" stroke="{color}" '
                f'stroke-width="1.5"{dash_attr}/>'
            )
        parts.append(f'<text x="{lx + 34}" y="{ly}">{_escape(label)}</text>')

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _finite_segments(x: np.ndarray, y: np.ndarray):
    ok = np.isfinite(x) & np.isfinite(y)
    start = None
    for i, good in enumerate(ok):
        if good and start is None:
            start = i
        elif not good and start is not None:
            if i - start >= 2:
                yield x[start:i], y[start:i]
            start = None
    if start is not None and ok.size - start >= 2:
        yield x[start:], y[start:]
