"""Minimal self-contained SVG emitters (no plotting dependency)."""
from __future__ import annotations

import numpy as np

# viridis-like anchors, linearly interpolated
_STOPS = np.array([
    (68, 1, 84), (59, 82, 139), (33, 145, 140), (94, 201, 98), (253, 231, 37),
], dtype=float)


def _color(x: float) -> str:
    x = min(max(x, 0.0), 1.0) * (len(_STOPS) - 1)
    i = min(int(x), len(_STOPS) - 2)
    f = x - i
    r, g, b = (_STOPS[i] * (1 - f) + _STOPS[i + 1] * f).astype(int)
    return f"#{r:02x}{g:02x}{b:02x}"


def heatmap_svg(tgrid, sgrid, z, title: str = "", size: int = 640) -> str:
    """Cell heatmap of z[i, j] = value at (t_i, s_j); t is the y axis."""
    z = np.asarray(z, dtype=float)
    nt, ns = z.shape
    lo, hi = float(np.min(z)), float(np.max(z))
    span = hi - lo if hi > lo else 1.0
    margin = 40
    w = h = size
    cw, ch = w / ns, h / nt
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w + 2 * margin}" '
        f'height="{h + 2 * margin + 20}" viewBox="0 0 {w + 2 * margin} {h + 2 * margin + 20}">',
        f'<text x="{margin}" y="20" font-family="monospace" font-size="14">{title}</text>',
        f'<g transform="translate({margin},{margin})">',
    ]
    for i in range(nt):
        y = h - (i + 1) * ch
        row = []
        for j in range(ns):
            c = _color((z[i, j] - lo) / span)
            row.append(f'<rect x="{j * cw:.2f}" y="{y:.2f}" width="{cw + 0.5:.2f}" '
                       f'height="{ch + 0.5:.2f}" fill="{c}"/>')
        parts.append("".join(row))
    parts.append('</g>')
    parts.append(f'<text x="{margin}" y="{h + 2 * margin + 12}" font-family="monospace" '
                 f'font-size="11">s in [0,1] horizontal, t in [0,1] vertical; '
                 f'range [{lo:.6g}, {hi:.6g}]</text>')
    parts.append('</svg>')
    return "\n".join(parts)


def line_svg(x, ys, labels=(), title: str = "", size: tuple[int, int] = (720, 420)) -> str:
    """Polyline chart of one or more series over x."""
    x = np.asarray(x, dtype=float)
    series = [np.asarray(y, dtype=float) for y in ys]
    w, h = size
    margin = 50
    finite = np.concatenate([s[np.isfinite(s)] for s in series])
    ylo, yhi = float(np.min(finite)), float(np.max(finite))
    if yhi <= ylo:
        yhi = ylo + 1.0
    pad = 0.05 * (yhi - ylo)
    ylo, yhi = ylo - pad, yhi + pad
    xlo, xhi = float(x[0]), float(x[-1])

    def px(v):
        return margin + (v - xlo) / (xhi - xlo) * w

    def py(v):
        return margin + h - (v - ylo) / (yhi - ylo) * h

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w + 2 * margin}" '
        f'height="{h + 2 * margin}" viewBox="0 0 {w + 2 * margin} {h + 2 * margin}">',
        f'<text x="{margin}" y="24" font-family="monospace" font-size="14">{title}</text>',
        f'<rect x="{margin}" y="{margin}" width="{w}" height="{h}" fill="none" '
        f'stroke="#999"/>',
    ]
    if ylo < 0 < yhi:
        parts.append(f'<line x1="{margin}" x2="{margin + w}" y1="{py(0):.2f}" '
                     f'y2="{py(0):.2f}" stroke="#ccc"/>')
    for k, s in enumerate(series):
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, s) if np.isfinite(b))
        parts.append(f'<polyline points="{pts}" fill="none" '
                     f'stroke="{colors[k % len(colors)]}" stroke-width="1.5"/>')
        if k < len(labels):
            parts.append(f'<text x="{margin + 8}" y="{margin + 16 + 14 * k}" '
                         f'font-family="monospace" font-size="11" '
                         f'fill="{colors[k % len(colors)]}">{labels[k]}</text>')
    for frac in (0.0, 0.5, 1.0):
        xv = xlo + frac * (xhi - xlo)
        yv = ylo + frac * (yhi - ylo)
        parts.append(f'<text x="{px(xv) - 10:.1f}" y="{margin + h + 16}" '
                     f'font-family="monospace" font-size="10">{xv:.3g}</text>')
        parts.append(f'<text x="4" y="{py(yv) + 4:.1f}" font-family="monospace" '
                     f'font-size="10">{yv:.3g}</text>')
    parts.append('</svg>')
    return "\n".join(parts)
