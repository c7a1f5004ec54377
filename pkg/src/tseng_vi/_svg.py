"""Dependency-free SVG line plot of log10(residual) against iteration."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
           "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22")
WIDTH, HEIGHT = 720, 440
LEFT, RIGHT, TOP, BOTTOM = 70, 170, 40, 50
FLOOR = -16.0
MAX_POINTS = 2000


def _log_res(values):
    out = []
    for v in values:
        if not math.isfinite(v):
            out.append(None)
        elif v <= 0:
            out.append(FLOOR)
        else:
            out.append(max(FLOOR, math.log10(v)))
    return out


def residual_plot(title, series):
    """Render ``series``: list of ``(method, ks, residuals)``; one colour per method."""
    methods = []
    for method, _, _ in series:
        if method not in methods:
            methods.append(method)
    colours = {m: PALETTE[i % len(PALETTE)] for i, m in enumerate(methods)}

    curves = []
    kmax, ymin, ymax = 1, 0.0, 1.0
    for method, ks, res in series:
        pts = [(k, y) for k, y in zip(ks, _log_res(res)) if y is not None]
        if len(pts) > MAX_POINTS:
            stride = math.ceil(len(pts) / MAX_POINTS)
            pts = pts[::stride] + ([pts[-1]] if (len(pts) - 1) % stride else [])
        curves.append((method, pts))
        if pts:
            kmax = max(kmax, max(k for k, _ in pts))
            ymin = min(ymin, min(y for _, y in pts))
            ymax = max(ymax, max(y for _, y in pts))
    ymin, ymax = math.floor(ymin), math.ceil(ymax)
    if ymax == ymin:
        ymax = ymin + 1
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def sx(k):
        return LEFT + pw * k / kmax

    def sy(y):
        return TOP + ph * (ymax - y) / (ymax - ymin)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
           f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
           f'<text x="{LEFT}" y="{TOP - 15}" font-size="14">{escape(title)}</text>',
           f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    step = max(1, (ymax - ymin) // 8)
    for y in range(ymin, ymax + 1, step):
        yy = sy(y)
        out.append(f'<line x1="{LEFT}" y1="{yy:.2f}" x2="{LEFT + pw}" y2="{yy:.2f}" '
                   f'stroke="#dddddd"/>')
        out.append(f'<text x="{LEFT - 8}" y="{yy + 4:.2f}" text-anchor="end">1e{y}</text>')
    for i in range(5):
        k = kmax * i / 4
        out.append(f'<text x="{sx(k):.2f}" y="{TOP + ph + 18}" text-anchor="middle">'
                   f'{int(round(k))}</text>')
    out.append(f'<text x="{LEFT + pw / 2:.2f}" y="{HEIGHT - 10}" text-anchor="middle">'
               f'iteration k</text>')
    out.append(f'<text x="16" y="{TOP + ph / 2:.2f}" text-anchor="middle" '
               f'transform="rotate(-90 16 {TOP + ph / 2:.2f})">residual (log scale)</text>')
    for method, pts in curves:
        if not pts:
            continue
        coords = " ".join(f"{sx(k):.2f},{sy(y):.2f}" for k, y in pts)
        out.append(f'<polyline fill="none" stroke="{colours[method]}" stroke-width="1.5" '
                   f'points="{coords}"/>')
    for i, m in enumerate(methods):
        y = TOP + 10 + 18 * i
        x = LEFT + pw + 15
        out.append(f'<line x1="{x}" y1="{y}" x2="{x + 24}" y2="{y}" stroke="{colours[m]}" '
                   f'stroke-width="2"/>')
        out.append(f'<text x="{x + 30}" y="{y + 4}">{escape(m)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
