"""Finite unions of half-open arcs on the direction circle ``[0, 2pi)``.

The canonical form is a sorted tuple of disjoint, non-touching pieces
``(start, end)`` with ``0 <= start < end <= 2pi``. An arc that wraps past
zero is stored as two pieces, ``(0, b)`` and ``(a, 2pi)``, so equal sets have
equal representations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .geometry import TWO_PI, normalize_angle


def _merge(pieces) -> tuple:
    pieces = sorted((a, b) for a, b in pieces if b > a)
    out: list = []
    for a, b in pieces:
        if out and a <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], b))
        else:
            out.append((a, b))
    return tuple(out)


@dataclass(frozen=True)
class ArcSet:
    pieces: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "pieces", _merge(self.pieces))

    @classmethod
    def full(cls) -> "ArcSet":
        return cls(((0.0, TWO_PI),))

    @classmethod
    def empty(cls) -> "ArcSet":
        return cls(())

    @classmethod
    def from_arcs(cls, arcs: Iterable) -> "ArcSet":
        """Build from counterclockwise arcs ``(start, end)``; ``end < start`` wraps."""
        pieces = []
        for a, b in arcs:
            length = b - a
            if length >= TWO_PI:
                return cls.full()
            if length < 0:
                length += TWO_PI
            if length <= 0:
                continue
            a = normalize_angle(a)
            end = a + length
            if end <= TWO_PI:
                pieces.append((a, end))
            else:
                pieces.append((a, TWO_PI))
                pieces.append((0.0, end - TWO_PI))
        return cls(tuple(pieces))

    @property
    def is_empty(self) -> bool:
        return not self.pieces

    @property
    def is_full(self) -> bool:
        return self.pieces == ((0.0, TWO_PI),)

    def measure(self) -> float:
        return sum(b - a for a, b in self.pieces)

    def contains(self, theta: float) -> bool:
        t = normalize_angle(theta)
        return any(a <= t < b for a, b in self.pieces)

    def complement(self) -> "ArcSet":
        out = []
        cur = 0.0
        for a, b in self.pieces:
            if a > cur:
                out.append((cur, a))
            cur = b
        if cur < TWO_PI:
            out.append((cur, TWO_PI))
        return ArcSet(tuple(out))

    def union(self, other: "ArcSet") -> "ArcSet":
        return ArcSet(self.pieces + other.pieces)

    def intersection(self, other: "ArcSet") -> "ArcSet":
        out = []
        for a, b in self.pieces:
            for c, d in other.pieces:
                lo, hi = max(a, c), min(b, d)
                if hi > lo:
                    out.append((lo, hi))
        return ArcSet(tuple(out))

    def difference(self, other: "ArcSet") -> "ArcSet":
        return self.intersection(other.complement())

    def rotate(self, delta: float) -> "ArcSet":
        return ArcSet.from_arcs((a + delta, b + delta) for a, b in self.pieces)

    def components(self) -> list:
        """Arcs as ``(start, end)`` with the wraparound piece rejoined."""
        ps = list(self.pieces)
        if len(ps) >= 2 and ps[0][0] == 0.0 and ps[-1][1] == TWO_PI:
            first = ps.pop(0)
            last = ps.pop()
            ps.append((last[0], first[1]))
        return ps

    def __len__(self) -> int:
        return len(self.components())

    def __or__(self, other):
        return self.union(other)

    def __and__(self, other):
        return self.intersection(other)

    def __invert__(self):
        return self.complement()


def symmetric_difference_measure(a: ArcSet, b: ArcSet) -> float:
    return a.difference(b).measure() + b.difference(a).measure()


def from_samples(thetas, member, boundary=None, batched: bool = False) -> ArcSet:
    """Arc set from membership flags at sorted sample angles.

    Each run of member samples becomes an arc. Boundaries between a member
    and a non-member sample are placed by ``boundary(t_in, t_out)`` when given,
    otherwise at the midpoint. With ``batched`` the callable receives arrays
    holding every boundary at once and returns an array.
    """
    thetas = [float(t) for t in thetas]
    member = [bool(m) for m in member]
    m = len(thetas)
    if m == 0 or not any(member):
        return ArcSet.empty()
    if all(member):
        return ArcSet.full()

    # (start?, t_in, t_out) for every member/non-member transition, in sweep order
    k0 = next(i for i in range(m) if not member[i])
    events = []
    for step in range(m):
        i = (k0 + step) % m
        j = (i + 1) % m
        t_a, t_b = thetas[i], thetas[j] + (TWO_PI if j == 0 else 0.0)
        if not member[i] and member[j]:
            events.append((True, t_b, t_a))
        elif member[i] and not member[j]:
            events.append((False, t_a, t_b))
    t_in = np.array([e[1] for e in events])
    t_out = np.array([e[2] for e in events])
    if boundary is None:
        cuts = 0.5 * (t_in + t_out)
    elif batched:
        cuts = np.asarray(boundary(t_in, t_out), dtype=float)
    else:
        cuts = np.array([boundary(a, b) for a, b in zip(t_in, t_out)])
    arcs = []
    start = None
    for (is_start, _, _), cut in zip(events, cuts):
        if is_start:
            start = float(cut)
        else:
            arcs.append((start, float(cut)))
    return ArcSet.from_arcs(arcs)


def angular_distance(a: float, b: float) -> float:
    d = abs(normalize_angle(a) - normalize_angle(b))
    return min(d, TWO_PI - d)

