"""Static SVG figures: persistence diagrams and angle-colored scatter plots.

Output is plain text built by hand so that it is byte-stable across runs.
"""

from __future__ import annotations

import colorsys
import math
from pathlib import Path

import numpy as np

PANEL = 320
MARGIN = 28
UNCOVERED = "#b4b4b4"


def angle_color(angle):
    """Cyclic hue for an angle in ``(-pi, pi]``; gray for ``NaN``."""
    if angle is None or math.isnan(angle):
        return UNCOVERED
    hue = (angle + math.pi) / (2.0 * math.pi)
    r, g, b = colorsys.hsv_to_rgb(hue % 1.0, 0.85, 0.9)
    return "#%02x%02x%02x" % (round(255 * r), round(255 * g), round(255 * b))


def _scale(values, lo, hi):
    vmin, vmax = float(np.min(values)), float(np.max(values))
    span = vmax - vmin if vmax > vmin else 1.0
    return lo + (np.asarray(values) - vmin) / span * (hi - lo), (vmin, span)


def _fmt(x):
    return f"{x:.2f}"


def scatter_panel(xy, angles, landmark_xy=None, title=""):
    """SVG fragment for one scatter panel of size ``PANEL``."""
    xy = np.asarray(xy, dtype=np.float64)
    allxy = xy if landmark_xy is None else np.vstack([xy, landmark_xy])
    lo, hi = MARGIN, PANEL - MARGIN
    _, (xmin, xspan) = _scale(allxy[:, 0], lo, hi)
    _, (ymin, yspan) = _scale(allxy[:, 1], lo, hi)
    span = max(xspan, yspan)

    def px(p):
        return (lo + (p[0] - xmin) / span * (hi - lo),
                hi - (p[1] - ymin) / span * (hi - lo))

    out = [f'<text x="{PANEL / 2:.0f}" y="16" text-anchor="middle" font-size="12">{title}</text>']
    for p, a in zip(xy, angles):
        x, y = px(p)
        out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="2.2" fill="{angle_color(a)}"/>')
    if landmark_xy is not None:
        for p in np.asarray(landmark_xy):
            x, y = px(p)
            out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="4.5" fill="none" '
                       'stroke="#202020" stroke-width="1.2"/>')
    return out


def diagram_panel(pairs, title="persistence"):
    """SVG fragment plotting dimension 0 (blue) and 1 (red) pairs."""
    finite = [p.death for p in pairs if p.is_finite]
    top = max(finite + [p.birth for p in pairs] + [1e-9]) * 1.05
    lo, hi = MARGIN, PANEL - MARGIN

    def px(v):
        return lo + min(v, top) / top * (hi - lo)

    out = [f'<text x="{PANEL / 2:.0f}" y="16" text-anchor="middle" font-size="12">{title}</text>',
           f'<line x1="{lo}" y1="{hi}" x2="{hi}" y2="{lo}" stroke="#999" stroke-width="1"/>',
           f'<rect x="{lo}" y="{lo}" width="{hi - lo}" height="{hi - lo}" fill="none" stroke="#444"/>']
    for p in pairs:
        color = "#1f4fd1" if p.dim == 0 else "#d12a1f"
        x = px(p.birth)
        y = PANEL - px(p.death if p.is_finite else top)
        shape = "circle" if p.is_finite else "rect"
        if shape == "circle":
            out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="3" fill="{color}"/>')
        else:
            out.append(f'<rect x="{_fmt(x - 3)}" y="{_fmt(y - 3)}" width="6" height="6" fill="{color}"/>')
    return out


def write_figure(path, panels):
    """Lay out panel fragments in one row and write the SVG file."""
    width = PANEL * max(len(panels), 1)
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{PANEL}" '
             f'viewBox="0 0 {width} {PANEL}">',
             f'<rect width="{width}" height="{PANEL}" fill="white"/>']
    for k, frag in enumerate(panels):
        parts.append(f'<g transform="translate({k * PANEL},0)">')
        parts.extend(frag)
        parts.append("</g>")
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")
