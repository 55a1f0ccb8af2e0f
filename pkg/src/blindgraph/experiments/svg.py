"""Minimal SVG writers for heatmaps and line plots."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _grey(v: float) -> str:
    # 1 is white, 0 is black
    g = int(round(255 * min(1.0, max(0.0, v))))
    return f"rgb({g},{g},{g})"


def heatmap(values, row_labels, col_labels, title="", row_name="", col_name="") -> str:
    V = np.asarray(values, dtype=float)
    nr, nc = V.shape
    cell, left, top = 40, 70, 50
    w, h = left + nc * cell + 20, top + nr * cell + 50
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">',
           f'<text x="{w / 2:.1f}" y="20" text-anchor="middle">{escape(title)}</text>']
    for i in range(nr):
        for j in range(nc):
            x, y = left + j * cell, top + i * cell
            v = V[i, j]
            fill = "rgb(255,0,255)" if np.isnan(v) else _grey(v)
            out.append(f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="{fill}" stroke="#888"/>')
            if not np.isnan(v):
                col = "black" if v > 0.5 else "white"
                out.append(f'<text x="{x + cell / 2:.1f}" y="{y + cell / 2 + 4:.1f}" text-anchor="middle" '
                           f'fill="{col}">{v:.2f}</text>')
        out.append(f'<text x="{left - 6}" y="{top + i * cell + cell / 2 + 4:.1f}" text-anchor="end">'
                   f'{escape(str(row_labels[i]))}</text>')
    for j in range(nc):
        out.append(f'<text x="{left + j * cell + cell / 2:.1f}" y="{top + nr * cell + 16}" text-anchor="middle">'
                   f'{escape(str(col_labels[j]))}</text>')
    out.append(f'<text x="{left + nc * cell / 2:.1f}" y="{top + nr * cell + 36}" text-anchor="middle">'
               f'{escape(col_name)}</text>')
    out.append(f'<text x="14" y="{top + nr * cell / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 14 {top + nr * cell / 2:.1f})">{escape(row_name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def line_plot(series: dict, title="", x_name="", y_name="", dashed=()) -> str:
    """``series`` maps a label to ``(xs, ys)``; non-finite points are skipped."""
    W, H, left, right, top, bottom = 520, 340, 60, 150, 40, 50
    pts = [(float(x), float(y)) for xs, ys in series.values() for x, y in zip(xs, ys) if np.isfinite(y)]
    if pts:
        x0, x1 = min(p[0] for p in pts), max(p[0] for p in pts)
        y0, y1 = min(0.0, min(p[1] for p in pts)), max(p[1] for p in pts)
    else:
        x0, x1, y0, y1 = 0.0, 1.0, 0.0, 1.0
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y1 = y0 + 1
    pw, ph = W - left - right, H - top - bottom

    def sx(x):
        return left + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return top + ph - (y - y0) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">',
           f'<text x="{left + pw / 2:.1f}" y="20" text-anchor="middle">{escape(title)}</text>',
           f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
           f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>']
    for k in range(5):
        xv, yv = x0 + k * (x1 - x0) / 4, y0 + k * (y1 - y0) / 4
        out.append(f'<text x="{sx(xv):.1f}" y="{top + ph + 16}" text-anchor="middle">{_fmt(xv)}</text>')
        out.append(f'<text x="{left - 6}" y="{sy(yv) + 4:.1f}" text-anchor="end">{_fmt(yv)}</text>')
    for n, (label, (xs, ys)) in enumerate(series.items()):
        col = PALETTE[n % len(PALETTE)]
        coords = " ".join(f"{sx(x):.1f},{sy(y):.1f}" for x, y in zip(xs, ys) if np.isfinite(y))
        dash = ' stroke-dasharray="6,4"' if label in dashed else ""
        if coords:
            out.append(f'<polyline points="{coords}" fill="none" stroke="{col}" stroke-width="2"{dash}/>')
        ly = top + 14 + 18 * n
        out.append(f'<line x1="{left + pw + 10}" y1="{ly}" x2="{left + pw + 30}" y2="{ly}" stroke="{col}" '
                   f'stroke-width="2"{dash}/>')
        out.append(f'<text x="{left + pw + 36}" y="{ly + 4}">{escape(str(label))}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{H - 12}" text-anchor="middle">{escape(x_name)}</text>')
    out.append(f'<text x="14" y="{top + ph / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 14 {top + ph / 2:.1f})">{escape(y_name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
