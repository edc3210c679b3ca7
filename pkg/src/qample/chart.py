"""Deterministic SVG rendering of rank-2 cone charts."""

from __future__ import annotations

import math

from .positivity import ConeChart, UnsupportedRank, slope_label

SIZE = 800
CENTER = SIZE / 2
RADIUS = 340
LABEL_RADIUS = 370

STYLES = {
    "default": {"fill": "#4c78a8", "opacity": "0.35", "stroke": "#1f3b57", "axis": "#888888"},
    "mono": {"fill": "#000000", "opacity": "0.2", "stroke": "#000000", "axis": "#000000"},
}


def _pt(v, r: float) -> tuple[str, str]:
    t = math.atan2(v[1], v[0])
    return f"{CENTER + r * math.cos(t):.3f}", f"{CENTER - r * math.sin(t):.3f}"


def _sweep(start, end) -> float:
    a = math.atan2(start[1], start[0])
    b = math.atan2(end[1], end[0])
    d = (b - a) % (2 * math.pi)
    return d if d > 0 else 2 * math.pi


def emit_chart(chart: ConeChart | None, style: str = "default", title: str | None = None) -> str:
    """SVG document: axes, one filled path per chamber, labelled boundary rays.

    ``chart=None`` (or a chart without chambers) yields the axes alone.
    """
    if chart is not None and len(chart.candidates[0]) != 2:
        raise UnsupportedRank("charts are drawn for rank-2 classes only")
    st = STYLES[style]
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">',
        f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="#ffffff"/>',
        f'<line x1="20" y1="{CENTER:.0f}" x2="{SIZE - 20}" y2="{CENTER:.0f}" stroke="{st["axis"]}" stroke-width="1"/>',
        f'<line x1="{CENTER:.0f}" y1="20" x2="{CENTER:.0f}" y2="{SIZE - 20}" stroke="{st["axis"]}" stroke-width="1"/>',
    ]
    if title is None and chart is not None:
        title = f"{chart.geometry}: q = {chart.q} ({chart.predicate})"
    if title:
        out.append(f'<text x="20" y="30" font-family="monospace" font-size="16">{_escape(title)}</text>')
    if chart is not None:
        for arc in chart.chambers:
            out.append(_wedge(arc, st))
        for ray in chart.boundary_rays:
            x, y = _pt(ray, RADIUS)
            lx, ly = _pt(ray, LABEL_RADIUS)
            out.append(f'<line x1="{CENTER:.3f}" y1="{CENTER:.3f}" x2="{x}" y2="{y}" '
                       f'stroke="{st["stroke"]}" stroke-width="2"/>')
            out.append(f'<text x="{lx}" y="{ly}" font-family="monospace" font-size="12" text-anchor="middle">'
                       f'({ray[0]},{ray[1]}) slope {slope_label(ray)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _wedge(arc, st) -> str:
    if arc.start == arc.end:
        return (f'<circle cx="{CENTER:.3f}" cy="{CENTER:.3f}" r="{RADIUS}" fill="{st["fill"]}" '
                f'fill-opacity="{st["opacity"]}" stroke="none"/>')
    sweep = _sweep(arc.start, arc.end)
    x1, y1 = _pt(arc.start, RADIUS)
    x2, y2 = _pt(arc.end, RADIUS)
    large = 1 if sweep > math.pi else 0
    # counter-clockwise in the plane is sweep-flag 0 once the y axis points down
    d = f"M {CENTER:.3f} {CENTER:.3f} L {x1} {y1} A {RADIUS} {RADIUS} 0 {large} 0 {x2} {y2} Z"
    return f'<path d="{d}" fill="{st["fill"]}" fill-opacity="{st["opacity"]}" stroke="{st["stroke"]}" stroke-width="1"/>'


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
