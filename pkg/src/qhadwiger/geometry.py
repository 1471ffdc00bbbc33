"""Planar convex primitives: polygons, directed lines, half-plane clipping.

Polygons are stored as counterclockwise vertex tuples with collinear and
duplicate points removed. Empty (no vertices) and degenerate (a point or a
segment) polygons are legal values with zero area.

A directed line with angle ``theta`` travels along ``d = (cos, sin)`` and has
left normal ``n = (-sin, cos)``. It is the set ``{p : p.n == offset}``; its
plus side (left of travel) is ``p.n >= offset`` and its minus side is
``p.n <= offset``. Both sides are closed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

import numpy as np

EPS_GEO = 1e-12
EPS_AREA = 1e-9
TWO_PI = 2.0 * math.pi

PLUS = "plus"
MINUS = "minus"


class Point2(NamedTuple):
    x: float
    y: float


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def normalize_angle(theta: float) -> float:
    t = math.fmod(theta, TWO_PI)
    if t < 0.0:
        t += TWO_PI
    if t >= TWO_PI:
        t = 0.0
    return t


def direction(theta: float) -> tuple[float, float]:
    return math.cos(theta), math.sin(theta)


def normal(theta: float) -> tuple[float, float]:
    return -math.sin(theta), math.cos(theta)


def normals(thetas) -> np.ndarray:
    """Left normals for an array of angles, shape ``(m, 2)``."""
    thetas = np.asarray(thetas, dtype=float)
    return np.stack([-np.sin(thetas), np.cos(thetas)], axis=-1)


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    @classmethod
    def empty(cls) -> "Interval":
        return cls(math.inf, -math.inf)

    @property
    def is_empty(self) -> bool:
        return not self.lo <= self.hi

    @property
    def length(self) -> float:
        return 0.0 if self.is_empty else self.hi - self.lo

    @property
    def midpoint(self) -> float:
        if self.is_empty:
            raise ValueError("midpoint of an empty interval")
        return 0.5 * (self.lo + self.hi)

    def intersect(self, other: "Interval") -> "Interval":
        return Interval(max(self.lo, other.lo), min(self.hi, other.hi))

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= x <= self.hi + tol


@dataclass(frozen=True)
class DirectedLine:
    theta: float
    offset: float

    def __post_init__(self):
        object.__setattr__(self, "theta", normalize_angle(float(self.theta)))
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def through(cls, p, q) -> "DirectedLine":
        """Line through ``p`` directed towards ``q``."""
        dx, dy = q[0] - p[0], q[1] - p[1]
        if math.hypot(dx, dy) == 0.0:
            raise ValueError("points coincide")
        theta = math.atan2(dy, dx)
        nx, ny = normal(theta)
        return cls(theta, p[0] * nx + p[1] * ny)

    @classmethod
    def through_point(cls, p, theta: float) -> "DirectedLine":
        nx, ny = normal(theta)
        return cls(theta, p[0] * nx + p[1] * ny)

    @property
    def direction(self) -> tuple[float, float]:
        return direction(self.theta)

    @property
    def normal(self) -> tuple[float, float]:
        return normal(self.theta)

    @property
    def foot(self) -> Point2:
        nx, ny = self.normal
        return Point2(self.offset * nx, self.offset * ny)

    def point_at(self, t: float) -> Point2:
        fx, fy = self.foot
        dx, dy = self.direction
        return Point2(fx + t * dx, fy + t * dy)

    def parameter(self, p) -> float:
        dx, dy = self.direction
        return p[0] * dx + p[1] * dy

    def signed_distance(self, p) -> float:
        """Positive on the plus (left) side."""
        nx, ny = self.normal
        return p[0] * nx + p[1] * ny - self.offset

    def reversed(self) -> "DirectedLine":
        return DirectedLine(self.theta + math.pi, -self.offset)


def convex_hull(points: Iterable, eps: float = EPS_GEO) -> tuple[Point2, ...]:
    """Counterclockwise hull without collinear points (monotone chain)."""
    pts = sorted({(float(p[0]), float(p[1])) for p in points})
    if len(pts) <= 1:
        return tuple(Point2(*p) for p in pts)

    def half(seq):
        chain: list = []
        for p in seq:
            while len(chain) >= 2 and _cross(chain[-2], chain[-1], p) <= eps:
                chain.pop()
            chain.append(p)
        return chain

    lower = half(pts)
    upper = half(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 2 and hull[0] == hull[1]:
        hull = hull[:1]
    return tuple(Point2(*p) for p in hull)


def is_convex_chain(points: Sequence, eps: float = EPS_GEO) -> bool:
    """True if the closed chain turns one way only (either orientation)."""
    k = len(points)
    if k <= 3:
        return True
    signs = set()
    for i in range(k):
        c = _cross(points[i], points[(i + 1) % k], points[(i + 2) % k])
        if c > eps:
            signs.add(1)
        elif c < -eps:
            signs.add(-1)
    return len(signs) <= 1


@dataclass(frozen=True)
class ConvexPolygon:
    """Compact convex polygon; construction normalizes the vertex list."""

    vertices: tuple[Point2, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "vertices", convex_hull(self.vertices))

    @classmethod
    def rectangle(cls, x0, y0, x1, y1) -> "ConvexPolygon":
        return cls(((x0, y0), (x1, y0), (x1, y1), (x0, y1)))

    def __len__(self) -> int:
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    @property
    def is_degenerate(self) -> bool:
        return len(self.vertices) < 3

    @cached_property
    def array(self) -> np.ndarray:
        return np.array(self.vertices, dtype=float).reshape(-1, 2)

    @cached_property
    def centroid(self) -> Point2:
        if self.is_empty:
            raise ValueError("empty polygon has no centroid")
        a = self.array
        return Point2(float(a[:, 0].mean()), float(a[:, 1].mean()))

    def translate(self, dx: float, dy: float) -> "ConvexPolygon":
        return ConvexPolygon([(x + dx, y + dy) for x, y in self.vertices])

    def rotate(self, angle: float, about=(0.0, 0.0)) -> "ConvexPolygon":
        c, s = math.cos(angle), math.sin(angle)
        ox, oy = about
        return ConvexPolygon(
            [(ox + c * (x - ox) - s * (y - oy), oy + s * (x - ox) + c * (y - oy))
             for x, y in self.vertices]
        )

    def contains(self, p, tol: float = EPS_GEO) -> bool:
        """Closed membership test."""
        vs = self.vertices
        k = len(vs)
        if k == 0:
            return False
        if k == 1:
            return math.hypot(p[0] - vs[0][0], p[1] - vs[0][1]) <= tol
        if k == 2:
            a, b = vs
            length = math.hypot(b[0] - a[0], b[1] - a[1])
            if abs(_cross(a, b, p)) > tol * max(1.0, length):
                return False
            t = ((p[0] - a[0]) * (b[0] - a[0]) + (p[1] - a[1]) * (b[1] - a[1])) / length**2
            return -tol <= t <= 1.0 + tol
        for i in range(k):
            a, b = vs[i], vs[(i + 1) % k]
            length = math.hypot(b[0] - a[0], b[1] - a[1])
            if _cross(a, b, p) < -tol * max(1.0, length):
                return False
        return True


EMPTY = ConvexPolygon(())


def clip_halfplane(poly: ConvexPolygon, line: DirectedLine, side: str) -> ConvexPolygon:
    """Intersect ``poly`` with the closed ``side`` half-plane of ``line``."""
    if side not in (PLUS, MINUS):
        raise ValueError(f"side must be {PLUS!r} or {MINUS!r}, got {side!r}")
    vs = poly.vertices
    if not vs:
        return EMPTY
    nx, ny = line.normal
    sign = 1.0 if side == PLUS else -1.0
    # keep h >= 0
    h = [sign * (x * nx + y * ny - line.offset) for x, y in vs]
    if min(h) >= 0.0:
        return poly
    if max(h) < 0.0:
        return EMPTY
    out = []
    k = len(vs)
    for i in range(k):
        p, q = vs[i], vs[(i + 1) % k]
        hp, hq = h[i], h[(i + 1) % k]
        if hp >= 0.0:
            out.append(p)
        if (hp >= 0.0) != (hq >= 0.0):
            t = hp / (hp - hq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return ConvexPolygon(out)


def clip_polygon(poly: ConvexPolygon, window: ConvexPolygon) -> ConvexPolygon:
    """Intersection of two convex polygons."""
    if poly.is_empty or window.is_empty:
        return EMPTY
    ws = window.vertices
    if len(ws) < 3:
        # degenerate window: keep the window points that lie in poly
        if len(ws) == 1:
            return window if poly.contains(ws[0]) else EMPTY
        a, b = ws
        line = DirectedLine.through(a, b)
        chord = line_poly_parameter_interval(poly, line)
        seg = Interval(min(line.parameter(a), line.parameter(b)),
                       max(line.parameter(a), line.parameter(b)))
        common = chord.intersect(seg)
        if common.is_empty:
            return EMPTY
        return ConvexPolygon([line.point_at(common.lo), line.point_at(common.hi)])
    out = poly
    for i in range(len(ws)):
        out = clip_halfplane(out, DirectedLine.through(ws[i], ws[(i + 1) % len(ws)]), PLUS)
        if out.is_empty:
            break
    return out


def area(poly: ConvexPolygon) -> float:
    vs = poly.vertices
    if len(vs) < 3:
        return 0.0
    x0, y0 = vs[0]
    s = 0.0
    for i in range(1, len(vs) - 1):
        s += _cross((x0, y0), vs[i], vs[i + 1])
    return 0.5 * abs(s)


def perimeter(poly: ConvexPolygon) -> float:
    """Boundary length; a segment counts both of its sides."""
    vs = poly.vertices
    if len(vs) < 2:
        return 0.0
    return sum(math.dist(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs)))


def diameter(poly: ConvexPolygon) -> float:
    vs = poly.vertices
    return max((math.dist(p, q) for i, p in enumerate(vs) for q in vs[i + 1:]), default=0.0)


def width(poly: ConvexPolygon) -> float:
    """Minimum directional extent, taken over edge normals (rotating calipers)."""
    vs = poly.vertices
    if len(vs) < 3:
        return 0.0
    best = math.inf
    for i in range(len(vs)):
        a, b = vs[i], vs[(i + 1) % len(vs)]
        length = math.dist(a, b)
        extent = max(abs(_cross(a, b, p)) for p in vs) / length
        best = min(best, extent)
    return best


def project_normal(poly: ConvexPolygon, theta: float) -> Interval:
    """Range of ``p . n(theta)`` over the polygon; empty for an empty polygon."""
    if poly.is_empty:
        return Interval.empty()
    nx, ny = normal(theta)
    vals = [x * nx + y * ny for x, y in poly.vertices]
    return Interval(min(vals), max(vals))


def line_poly_parameter_interval(poly: ConvexPolygon, line: DirectedLine,
                                 tol: float = EPS_GEO) -> Interval:
    """Parameters ``t`` (along the direction, origin at the foot) with ``p(t)`` in poly."""
    vs = poly.vertices
    if not vs:
        return Interval.empty()
    h = [line.signed_distance(p) for p in vs]
    ts = [line.parameter(p) for p, hp in zip(vs, h) if abs(hp) <= tol]
    k = len(vs)
    for i in range(k if k > 2 else k - 1):
        p, q = vs[i], vs[(i + 1) % k]
        hp, hq = h[i], h[(i + 1) % k]
        if (hp > tol and hq < -tol) or (hp < -tol and hq > tol):
            t = hp / (hp - hq)
            ts.append(line.parameter((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]))))
    if not ts:
        return Interval.empty()
    return Interval(min(ts), max(ts))


def _axes(vs) -> list:
    k = len(vs)
    axes = []
    if k >= 2:
        for i in range(k if k > 2 else 1):
            a, b = vs[i], vs[(i + 1) % k]
            ex, ey = b[0] - a[0], b[1] - a[1]
            axes.append((-ey, ex))
            if k == 2:
                axes.append((ex, ey))
    return axes


def disjoint(a: ConvexPolygon, b: ConvexPolygon, tol: float = EPS_GEO) -> bool:
    """True iff the closed sets do not meet (separating-axis test)."""
    if a.is_empty or b.is_empty:
        return True
    va, vb = a.vertices, b.vertices
    axes = _axes(va) + _axes(vb)
    if len(va) < 3 or len(vb) < 3:
        # point/segment cases also need the axis between nearest features
        ca, cb = a.centroid, b.centroid
        axes.append((cb[0] - ca[0], cb[1] - ca[1]))
        for p in va:
            for q in vb:
                axes.append((q[0] - p[0], q[1] - p[1]))
    for ax, ay in axes:
        norm = math.hypot(ax, ay)
        if norm == 0.0:
            continue
        ax, ay = ax / norm, ay / norm
        pa = [x * ax + y * ay for x, y in va]
        pb = [x * ax + y * ay for x, y in vb]
        if max(pa) < min(pb) - tol or max(pb) < min(pa) - tol:
            return True
    return False


# -- batched kernels ---------------------------------------------------------
# Evaluate many (normal, offset) cuts of one polygon at once. Used by the
# direction sweeps, where the same polygon is clipped thousands of times.

def _batch_pieces(V: np.ndarray, N: np.ndarray, S: np.ndarray):
    """Edge pieces of ``P ∩ {p.n <= s}`` for every column."""
    Q = np.roll(V, -1, axis=0)
    h = V @ N.T - S  # (k, m)
    hq = np.roll(h, -1, axis=0)
    in_p = h <= 0.0
    in_q = hq <= 0.0
    cut = in_p != in_q
    t = np.where(cut, h / np.where(cut, h - hq, 1.0), 0.0)
    P = V[:, None, :]
    D = (Q - V)[:, None, :]
    X = P + t[..., None] * D  # crossing point on each cut edge
    both = in_p & in_q
    leaving = in_p & ~in_q
    entering = ~in_p & in_q
    return P, Q[:, None, :], X, both, leaving, entering


def halfplane_area_batch(V: np.ndarray, N: np.ndarray, S: np.ndarray) -> np.ndarray:
    """Area of ``P ∩ {p.n <= s}`` for each row of ``N`` and entry of ``S``."""
    m = len(S)
    if len(V) < 3:
        return np.zeros(m)
    c = V.mean(axis=0)
    V = V - c
    S = S - N @ c
    P, Q, X, both, leaving, entering = _batch_pieces(V, N, S)

    def cross(a, b):
        return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]

    total = (np.where(both, cross(P, Q), 0.0)
             + np.where(leaving, cross(P, X), 0.0)
             + np.where(entering, cross(X, Q), 0.0)).sum(axis=0)
    exit_pt = np.where(leaving[..., None], X, 0.0).sum(axis=0)
    entry_pt = np.where(entering[..., None], X, 0.0).sum(axis=0)
    total += cross(exit_pt, entry_pt)
    return np.maximum(0.5 * total, 0.0)


def halfplane_perimeter_batch(V: np.ndarray, N: np.ndarray, S: np.ndarray) -> np.ndarray:
    """Perimeter of ``P ∩ {p.n <= s}``; matches :func:`perimeter` on degenerate pieces."""
    m = len(S)
    if len(V) == 0:
        return np.zeros(m)
    if len(V) == 1:
        return np.zeros(m)
    # a segment is a 2-cycle, so both of its sides are counted like the scalar version
    P, Q, X, both, leaving, entering = _batch_pieces(V, N, S)

    def dist(a, b):
        return np.hypot(a[..., 0] - b[..., 0], a[..., 1] - b[..., 1])

    total = (np.where(both, dist(P, Q), 0.0)
             + np.where(leaving, dist(P, X), 0.0)
             + np.where(entering, dist(X, Q), 0.0)).sum(axis=0)
    exit_pt = np.where(leaving[..., None], X, 0.0).sum(axis=0)
    entry_pt = np.where(entering[..., None], X, 0.0).sum(axis=0)
    has = leaving.any(axis=0) & entering.any(axis=0)
    total += np.where(has, dist(exit_pt, entry_pt), 0.0)
    return total
