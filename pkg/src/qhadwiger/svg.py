"""Deterministic SVG figures of families, lines and marked points."""

from __future__ import annotations

from typing import Iterable, Optional, Sequence
from xml.sax.saxutils import escape

import numpy as np

from . import geometry as geo
from .geometry import ConvexPolygon, DirectedLine

FILL = {"red": "#d62728", "green": "#2ca02c", "blue": "#1f77b4", None: "#7f7f7f"}
LINE_COLORS = ("#000000", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2")
WIDTH_PX = 720


def _fmt(x: float) -> str:
    return f"{x:.3f}"


class _Frame:
    def __init__(self, polys: Sequence[ConvexPolygon], pad: float = 0.08):
        pts = np.vstack([p.array for p in polys if not p.is_empty])
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        span = np.maximum(hi - lo, 1e-9)
        self.lo = lo - pad * span.max()
        self.hi = hi + pad * span.max()
        self.scale = WIDTH_PX / (self.hi[0] - self.lo[0])
        self.height = (self.hi[1] - self.lo[1]) * self.scale

    def xy(self, p) -> str:
        # flip y so the figure uses mathematical orientation
        x = (p[0] - self.lo[0]) * self.scale
        y = (self.hi[1] - p[1]) * self.scale
        return f"{_fmt(x)},{_fmt(y)}"

    def box(self) -> ConvexPolygon:
        return ConvexPolygon.rectangle(self.lo[0], self.lo[1], self.hi[0], self.hi[1])


def _polygon(frame, poly, fill, opacity, stroke="#333333") -> str:
    pts = " ".join(frame.xy(p) for p in poly.vertices)
    return (f'<polygon points="{pts}" fill="{fill}" fill-opacity="{opacity}" '
            f'stroke="{stroke}" stroke-width="1"/>')


def render_svg(family, lines: Sequence[DirectedLine] = (), points: Iterable = (),
               line_labels: Optional[Sequence[str]] = None, title: str = "",
               annotate: bool = True) -> str:
    """SVG text for ``family`` with optional lines and points.

    With ``annotate`` and at least one line, the part of each set on the
    left of the first line is shaded and labelled with both side values.
    """
    entries = list(family)
    frame = _Frame([e.shape for e in entries])
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH_PX}" '
           f'height="{_fmt(frame.height)}" viewBox="0 0 {WIDTH_PX} {_fmt(frame.height)}">',
           '<rect width="100%" height="100%" fill="#ffffff"/>']
    if title:
        out.append(f'<title>{escape(title)}</title>')
    for e in entries:
        color = getattr(e.color, "value", e.color)
        out.append(_polygon(frame, e.shape, FILL.get(color, FILL[None]), "0.15"))
    if lines and annotate:
        first = lines[0]
        for e in entries:
            plus = geo.clip_halfplane(e.shape, first, geo.PLUS)
            if not plus.is_empty and len(plus.vertices) >= 3:
                out.append(_polygon(frame, plus, "#000000", "0.12", stroke="none"))
            fp, fm = e.cut_value(first, geo.PLUS), e.cut_value(first, geo.MINUS)
            c = e.shape.array.mean(axis=0)
            out.append(f'<text x="{frame.xy(c).split(",")[0]}" y="{frame.xy(c).split(",")[1]}" '
                       f'font-size="11" text-anchor="middle">{escape(e.label)}: '
                       f'{fp:.3f} | {fm:.3f}</text>')
    elif annotate:
        for e in entries:
            x, y = frame.xy(e.shape.array.mean(axis=0)).split(",")
            out.append(f'<text x="{x}" y="{y}" font-size="11" text-anchor="middle">{escape(e.label)}</text>')
    box = frame.box()
    for k, line in enumerate(lines):
        iv = geo.line_poly_parameter_interval(box, line)
        if iv.is_empty:
            continue
        a, b = line.point_at(iv.lo), line.point_at(iv.hi)
        (x1, y1), (x2, y2) = frame.xy(a).split(","), frame.xy(b).split(",")
        color = LINE_COLORS[k % len(LINE_COLORS)]
        out.append(f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="{color}" stroke-width="1.5"/>')
        if line_labels and k < len(line_labels):
            out.append(f'<text x="{x2}" y="{y2}" font-size="12" fill="{color}">{escape(line_labels[k])}</text>')
    for p in points:
        x, y = frame.xy(p).split(",")
        out.append(f'<circle cx="{x}" cy="{y}" r="3" fill="#000000"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
