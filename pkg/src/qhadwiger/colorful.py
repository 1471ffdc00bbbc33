"""Colorful separating sign vectors and the middle line construction."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from . import geometry as geo
from .arcs import from_samples
from .geometry import DirectedLine
from .stabbing import DEFAULT_DIRECTIONS, Family, StabTable, search, stab_thresholds


class Color(str, enum.Enum):
    RED = "red"
    GREEN = "green"
    BLUE = "blue"

    @classmethod
    def parse(cls, value) -> "Color":
        if isinstance(value, Color):
            return value
        if value is None:
            raise ValueError("entry has no color")
        v = str(value).strip().lower()
        for c in cls:
            if v in (c.value, c.value[0]):
                return c
        raise ValueError(f"unknown color {value!r}")


COLORS = (Color.RED, Color.GREEN, Color.BLUE)


@dataclass(frozen=True)
class SignVector:
    signs: tuple
    colors: tuple

    def __post_init__(self):
        signs = tuple(int(s) for s in self.signs)
        colors = tuple(Color.parse(c) for c in self.colors)
        if len(signs) != len(colors):
            raise ValueError("signs and colors differ in length")
        if any(s not in (-1, 0, 1) for s in signs):
            raise ValueError("signs must be -1, 0 or 1")
        object.__setattr__(self, "signs", signs)
        object.__setattr__(self, "colors", colors)

    @classmethod
    def of(cls, pairs) -> "SignVector":
        pairs = list(pairs)
        return cls(tuple(s for s, _ in pairs), tuple(c for _, c in pairs))

    def __len__(self):
        return len(self.signs)

    def __iter__(self):
        return iter(zip(self.signs, self.colors))

    def is_zero(self) -> bool:
        return not any(self.signs)


@dataclass(frozen=True)
class ProjectionSummary:
    p: dict
    q: dict
    u: tuple
    v: tuple

    @property
    def theta_mid(self) -> float:
        """Normal offset of the middle line, ``(u_2 + v_2) / 2``."""
        return 0.5 * (self.u[1] + self.v[1])


def _colors(family) -> list:
    return [Color.parse(e.color) for e in family]


def sign_vector(line: DirectedLine, family) -> SignVector:
    """0 where the line stabs, -1 where the minus side is short, +1 otherwise."""
    colors = _colors(family)
    signs = []
    for e in family:
        t = e.threshold
        if e.cut_value(line, geo.MINUS) < t:
            signs.append(-1)
        elif e.cut_value(line, geo.PLUS) < t:
            signs.append(1)
        else:
            signs.append(0)
    return SignVector(tuple(signs), tuple(colors))


def summarize(lo, hi, colors, bound: float) -> ProjectionSummary:
    """Per-color ``p_c = max a_i`` and ``q_c = min b_i`` with the empty-set sentinel."""
    p, q = {}, {}
    for c in COLORS:
        idx = [i for i, ci in enumerate(colors) if ci == c]
        if not idx:
            raise ValueError(f"no {c.value} set in family")
        if any(lo[i] > hi[i] for i in idx):
            p[c], q[c] = bound + 1.0, -(bound + 1.0)
        else:
            p[c], q[c] = max(lo[i] for i in idx), min(hi[i] for i in idx)
    u = tuple(sorted(p.values()))
    v = tuple(sorted(q.values(), reverse=True))
    return ProjectionSummary(p, q, u, v)


def _bound(family, theta) -> float:
    n = geo.normals(np.array([theta]))[0]
    return float(max(np.abs(e.shape.array @ n).max() for e in family))


def middle_line(family, theta: float, lo=None, hi=None):
    """Middle separating line in direction ``theta`` with its sign vector and summary."""
    family = family if isinstance(family, Family) else Family(tuple(family))
    colors = _colors(family)
    if lo is None or hi is None:
        rows = [stab_thresholds(e, [theta]) for e in family]
        lo = [float(r[0][0]) for r in rows]
        hi = [float(r[1][0]) for r in rows]
    summary = summarize(lo, hi, colors, _bound(family, theta))
    line = DirectedLine(theta, summary.theta_mid)
    return line, sign_vector(line, family), summary


def color_class_stabbable(family, theta: float, lo=None, hi=None) -> dict:
    """Whether each color class has a common stabbing line in direction ``theta``."""
    colors = _colors(family)
    if lo is None or hi is None:
        rows = [stab_thresholds(e, [theta]) for e in family]
        lo = [float(r[0][0]) for r in rows]
        hi = [float(r[1][0]) for r in rows]
    out = {}
    for c in COLORS:
        idx = [i for i, ci in enumerate(colors) if ci == c]
        out[c] = bool(idx) and max(lo[i] for i in idx) <= min(hi[i] for i in idx)
    return out


def is_balanced(x: SignVector, both_orientations: bool = False) -> bool:
    """Every color pair shows opposite nonzero signs across its two colors.

    By default either orientation witnesses a pair; ``both_orientations``
    demands ``(+1 in c, -1 in c')`` and ``(-1 in c, +1 in c')`` together.
    """
    has = {(s, c) for s, c in x if s != 0}
    for a, b in combinations(COLORS, 2):
        one = (1, a) in has and (-1, b) in has
        other = (-1, a) in has and (1, b) in has
        ok = (one and other) if both_orientations else (one or other)
        if not ok:
            return False
    return True


def is_hadwiger(x: SignVector) -> bool:
    """No rainbow triple ``i < j < k`` reads ``(-1, 1, -1)`` or ``(1, -1, 1)``."""
    n = len(x)
    s, c = x.signs, x.colors
    for i in range(n):
        if s[i] == 0:
            continue
        for j in range(i + 1, n):
            if s[j] != -s[i] or c[j] == c[i]:
                continue
            for k in range(j + 1, n):
                if s[k] == s[i] and c[k] != c[i] and c[k] != c[j]:
                    return False
    return True


def _check_compatible(x: SignVector, y: SignVector):
    if len(x) != len(y) or x.colors != y.colors:
        raise ValueError("sign vectors differ in length or colors")


def precedes(x: SignVector, y: SignVector) -> bool:
    _check_compatible(x, y)
    return all(a == 0 or a == b for a, b in zip(x.signs, y.signs))


def first_nonzero(x: SignVector) -> Optional[tuple]:
    for i, s in enumerate(x.signs):
        if s:
            return i, s
    return None


def classify_directions(family, directions: int = DEFAULT_DIRECTIONS, table: Optional[StabTable] = None):
    """Sample angles and the first nonzero sign (or 0) of each middle vector."""
    family = family if isinstance(family, Family) else Family(tuple(family))
    table = table or StabTable(family, directions)
    out = np.zeros(table.directions, dtype=int)
    for k, theta in enumerate(table.thetas):
        _, x, _ = middle_line(family, float(theta), table.lo[:, k], table.hi[:, k])
        fn = first_nonzero(x)
        out[k] = 0 if fn is None else fn[1]
    return table.thetas, out


def s1_s2_direction_sets(family, directions: int = DEFAULT_DIRECTIONS):
    """Directions whose middle vector starts with +1 (``S1``) or -1 (``S2``)."""
    thetas, first = classify_directions(family, directions)
    return from_samples(thetas, first == 1), from_samples(thetas, first == -1)


def color_classes(family) -> dict:
    colors = _colors(family)
    return {c: [i for i, ci in enumerate(colors) if ci == c] for c in COLORS}


def find_monochromatic_transversal(family, directions: int = DEFAULT_DIRECTIONS,
                                   ordered: bool = False, table: Optional[StabTable] = None):
    """First color (red, green, blue) whose class has a common transversal."""
    family = family if isinstance(family, Family) else Family(tuple(family))
    table = table or StabTable(family, directions)
    for c, idx in color_classes(family).items():
        if not idx:
            continue
        line = search(table, idx, ordered=ordered)
        if line is not None:
            return c, line
    return None


def rainbow_triples(colors: Sequence) -> list:
    cs = [Color.parse(c) for c in colors]
    return [t for t in combinations(range(len(cs)), 3) if len({cs[i] for i in t}) == 3]


__all__ = [
    "Color", "COLORS", "SignVector", "ProjectionSummary", "sign_vector", "summarize", "middle_line",
    "color_class_stabbable", "is_balanced", "is_hadwiger", "precedes", "first_nonzero",
    "classify_directions", "s1_s2_direction_sets", "color_classes", "find_monochromatic_transversal",
    "rainbow_triples",
]
