"""Single-panel SVG rendering of a sweep column (line plot or heat map)."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

from .exceptions import CasimirKickError
from .sweep import UNITS

__all__ = ["emit_svg"]

WIDTH, HEIGHT = 640, 480
LEFT, RIGHT, TOP, BOTTOM = 80, 30, 30, 60


def _num(x):
    return f"{x:.3f}"


def _label(name):
    unit = UNITS.get(name, "-")
    return f"{name} [{unit}]"


def _span(values):
    lo, hi = min(values), max(values)
    if lo == hi:
        pad = abs(lo) * 0.5 or 0.5
        return lo - pad, hi + pad
    return lo, hi


def _scale(v, lo, hi, a, b):
    return a + (v - lo) / (hi - lo) * (b - a)


def _frame(parts, xlabel, ylabel, xr, yr):
    x0, x1 = LEFT, WIDTH - RIGHT
    y0, y1 = HEIGHT - BOTTOM, TOP
    parts.append(f'<rect x="{x0}" y="{y1}" width="{x1 - x0}" height="{y0 - y1}" fill="none" stroke="black"/>')
    parts.append(f'<text x="{(x0 + x1) / 2:.1f}" y="{HEIGHT - 15}" text-anchor="middle" font-size="14">{escape(xlabel)}</text>')
    parts.append(
        f'<text x="20" y="{(y0 + y1) / 2:.1f}" text-anchor="middle" font-size="14" '
        f'transform="rotate(-90 20 {(y0 + y1) / 2:.1f})">{escape(ylabel)}</text>'
    )
    for v, x, anchor in ((xr[0], x0, "start"), (xr[1], x1, "end")):
        parts.append(f'<text x="{x}" y="{y0 + 18}" text-anchor="{anchor}" font-size="11">{v:.4g}</text>')
    for v, y in ((yr[0], y0), (yr[1], y1 + 10)):
        parts.append(f'<text x="{x0 - 5}" y="{y}" text-anchor="end" font-size="11">{v:.4g}</text>')


def _color(t):
    # dark blue -> yellow
    t = min(1.0, max(0.0, t))
    r = int(round(30 + t * (250 - 30)))
    g = int(round(40 + t * (220 - 40)))
    b = int(round(120 + t * (40 - 120)))
    return f"#{r:02x}{g:02x}{b:02x}"


def emit_svg(rows, column, x_name, y_name=None):
    """Render ``column`` against the ``x_name`` axis (and ``y_name`` as a heat map).

    Rows whose value is not finite (including failed rows) are skipped.
    """
    if not column:
        raise CasimirKickError("no output column selected for the plot")
    x_key = f"axis1_{x_name}"
    y_key = f"axis2_{y_name}" if y_name else None
    pts = []
    for row in rows:
        if column not in row:
            raise CasimirKickError(f"column {column!r} not present in rows")
        v = row[column]
        if isinstance(v, (int, float)) and math.isfinite(v):
            pts.append((row[x_key], row[y_key] if y_key else None, float(v)))
    if not pts:
        raise CasimirKickError(f"no finite values in column {column!r} to plot")

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    x0, x1 = LEFT, WIDTH - RIGHT
    ybot, ytop = HEIGHT - BOTTOM, TOP
    xr = _span([p[0] for p in pts])
    if y_key is None:
        yr = _span([p[2] for p in pts])
        coords = [(_scale(x, *xr, x0, x1), _scale(v, *yr, ybot, ytop)) for x, _, v in pts]
        if len(coords) > 1:
            path = " ".join(f"{_num(a)},{_num(b)}" for a, b in coords)
            parts.append(f'<polyline points="{path}" fill="none" stroke="#1f4e9c" stroke-width="1.5"/>')
        for a, b in coords:
            parts.append(f'<circle cx="{_num(a)}" cy="{_num(b)}" r="2.5" fill="#1f4e9c"/>')
        _frame(parts, _label(x_name), _label(column), xr, yr)
    else:
        yr = _span([p[1] for p in pts])
        zr = _span([p[2] for p in pts])
        xs = sorted({p[0] for p in pts})
        ys = sorted({p[1] for p in pts})
        w = (x1 - x0) / len(xs)
        h = (ybot - ytop) / len(ys)
        xi = {x: i for i, x in enumerate(xs)}
        yi = {y: i for i, y in enumerate(ys)}
        for x, y, v in pts:
            cx = x0 + xi[x] * w
            cy = ybot - (yi[y] + 1) * h
            fill = _color((v - zr[0]) / (zr[1] - zr[0]))
            parts.append(f'<rect x="{_num(cx)}" y="{_num(cy)}" width="{_num(w)}" height="{_num(h)}" fill="{fill}"/>')
        _frame(parts, _label(x_name), _label(y_name), xr, yr)
        parts.append(
            f'<text x="{WIDTH - RIGHT}" y="{TOP - 10}" text-anchor="end" font-size="12">'
            f"{escape(_label(column))}: {zr[0]:.4g} .. {zr[1]:.4g}</text>"
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
