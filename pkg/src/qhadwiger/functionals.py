"""Monotone set functionals on convex polygons.

Every built-in kind is nondecreasing under inclusion and vanishes on the
empty set. Decreasing functionals are not a separate kind: negate the values
and the threshold on the caller's side.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import geometry as geo
from .geometry import ConvexPolygon, DirectedLine

AREA = "area"
PERIMETER = "perimeter"
DIAMETER = "diameter"
WIDTH = "width"
PERCENT_AREA = "percent_area"
KINDS = (AREA, PERIMETER, DIAMETER, WIDTH, PERCENT_AREA)


class InvalidFunctional(ValueError):
    pass


@dataclass(frozen=True)
class FunctionalSpec:
    kind: str
    base: Optional[ConvexPolygon] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidFunctional(f"unknown functional kind {self.kind!r}")
        if self.kind == PERCENT_AREA:
            if self.base is None or geo.area(self.base) <= 0.0:
                raise InvalidFunctional("percent_area needs a base polygon with positive area")
        elif self.base is not None:
            raise InvalidFunctional(f"{self.kind} takes no base polygon")

    @classmethod
    def area(cls) -> "FunctionalSpec":
        return cls(AREA)

    @classmethod
    def perimeter(cls) -> "FunctionalSpec":
        return cls(PERIMETER)

    @classmethod
    def diameter(cls) -> "FunctionalSpec":
        return cls(DIAMETER)

    @classmethod
    def width(cls) -> "FunctionalSpec":
        return cls(WIDTH)

    @classmethod
    def percent_area_of(cls, base: ConvexPolygon) -> "FunctionalSpec":
        return cls(PERCENT_AREA, base)

    @property
    def batched(self) -> bool:
        return self.kind in (AREA, PERIMETER, PERCENT_AREA)


def evaluate(spec: FunctionalSpec, poly: ConvexPolygon) -> float:
    if poly.is_empty:
        return 0.0
    if spec.kind == AREA:
        return geo.area(poly)
    if spec.kind == PERIMETER:
        return geo.perimeter(poly)
    if spec.kind == DIAMETER:
        return geo.diameter(poly)
    if spec.kind == WIDTH:
        return geo.width(poly)
    base = spec.base
    if poly is base or poly == base:
        return 1.0
    return geo.area(geo.clip_polygon(poly, base)) / geo.area(base)


def offset_profile(spec: FunctionalSpec, poly: ConvexPolygon, theta: float, s: float) -> float:
    """``f`` of the part of ``poly`` on the minus side of ``line(theta, s)``."""
    return evaluate(spec, geo.clip_halfplane(poly, DirectedLine(theta, s), geo.MINUS))


def effective_polygon(spec: FunctionalSpec, poly: ConvexPolygon) -> ConvexPolygon:
    """The polygon whose cuts the batched kernels measure."""
    if spec.kind == PERCENT_AREA and poly != spec.base:
        return geo.clip_polygon(poly, spec.base)
    return poly


def profile_batch(spec: FunctionalSpec, poly: ConvexPolygon, normals: np.ndarray,
                  offsets: np.ndarray, side: str = geo.MINUS) -> np.ndarray:
    """Vectorized ``f(side-cut of poly)`` over rows of ``normals``/``offsets``.

    Falls back to a scalar loop for functionals without a batched kernel.
    ``poly`` should already be the :func:`effective_polygon`.
    """
    normals = np.asarray(normals, dtype=float)
    offsets = np.asarray(offsets, dtype=float)
    if side == geo.PLUS:
        normals, offsets = -normals, -offsets
    if spec.batched:
        V = poly.array
        if spec.kind == PERIMETER:
            return geo.halfplane_perimeter_batch(V, normals, offsets)
        a = geo.halfplane_area_batch(V, normals, offsets)
        if spec.kind == PERCENT_AREA:
            a = a / geo.area(spec.base)
        return a
    out = np.empty(len(offsets))
    for i, ((nx, ny), s) in enumerate(zip(normals, offsets)):
        # normal (nx, ny) = (-sin t, cos t)
        theta = np.arctan2(-nx, ny)
        out[i] = evaluate(spec, geo.clip_halfplane(poly, DirectedLine(theta, s), geo.MINUS))
    return out
