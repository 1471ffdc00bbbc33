"""Independent reference computations used only by the tests.

None of these call into the library's clipping or area code.
"""

from __future__ import annotations

import math

import numpy as np
from shapely.geometry import Point, Polygon, box


def shp(poly) -> Polygon:
    return Polygon([(p.x, p.y) for p in poly.vertices])


def halfplane_box(theta: float, s: float, side: str, big: float = 1e4) -> Polygon:
    """Large polygon covering the closed half-plane p.n >= s (plus) or <= s (minus)."""
    d = np.array([math.cos(theta), math.sin(theta)])
    n = np.array([-math.sin(theta), math.cos(theta)])
    foot = s * n
    sign = 1.0 if side == "plus" else -1.0
    pts = [foot - big * d, foot + big * d, foot + big * d + sign * big * n, foot - big * d + sign * big * n]
    return Polygon([tuple(p) for p in pts])


def shapely_side_area(poly, theta, s, side) -> float:
    return shp(poly).intersection(halfplane_box(theta, s, side)).area


def chord_breaks(V: np.ndarray, theta: float):
    """Chord length of the polygon across lines p.n = t at each vertex level t."""
    n = np.array([-math.sin(theta), math.cos(theta)])
    u = np.array([math.cos(theta), math.sin(theta)])
    t = V @ n
    w = V @ u
    levels = np.unique(t)
    chords = []
    k = len(V)
    for lv in levels:
        ws = []
        for i in range(k):
            a, b = i, (i + 1) % k
            ta, tb = t[a], t[b]
            if ta == tb:
                if ta == lv:
                    ws += [w[a], w[b]]
                continue
            if min(ta, tb) <= lv <= max(ta, tb):
                r = (lv - ta) / (tb - ta)
                ws.append(w[a] + r * (w[b] - w[a]))
        chords.append(max(ws) - min(ws) if ws else 0.0)
    return levels, np.array(chords)


def area_below(V: np.ndarray, theta: float, s) -> np.ndarray:
    """Area of {p in P : p.n <= s} by integrating the piecewise linear chord length."""
    levels, c = chord_breaks(V, theta)
    s = np.atleast_1d(np.asarray(s, dtype=float))
    dt = np.diff(levels)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (c[:-1] + c[1:]) * dt)])
    out = np.empty_like(s)
    j = np.clip(np.searchsorted(levels, s, side="right") - 1, 0, len(levels) - 2)
    for i, (si, ji) in enumerate(zip(s, j)):
        if si <= levels[0]:
            out[i] = 0.0
        elif si >= levels[-1]:
            out[i] = cum[-1]
        else:
            h = dt[ji]
            x = si - levels[ji]
            slope = (c[ji + 1] - c[ji]) / h
            out[i] = cum[ji] + c[ji] * x + 0.5 * slope * x * x
    return out


def percent_sides(V: np.ndarray, theta: float, s):
    """(plus fraction, minus fraction) for the percent-area functional of P itself."""
    total = area_below(V, theta, np.inf)[0]
    m = area_below(V, theta, s) / total
    return 1.0 - m, m


def monte_carlo_disjoint(a, b, rng, samples: int = 4000) -> bool:
    """No sampled point of ``a`` lies in ``b`` (and vice versa)."""
    pa, pb = shp(a), shp(b)
    for src, dst in ((pa, pb), (pb, pa)):
        x0, y0, x1, y1 = src.bounds
        xs = rng.uniform(x0, x1, samples)
        ys = rng.uniform(y0, y1, samples)
        for x, y in zip(xs, ys):
            pt = Point(x, y)
            if src.covers(pt) and dst.covers(pt):
                return False
    return True


def grid_stab_offsets(V: np.ndarray, theta: float, alpha: float, offsets: np.ndarray,
                      slack: float = 1e-9) -> np.ndarray:
    """Mask of grid offsets whose line stabs P at level alpha (percent area of itself)."""
    plus, minus = percent_sides(V, theta, offsets)
    t = alpha - slack
    return (plus >= t) & (minus >= t)


def grid_thresholds(V: np.ndarray, thetas, alpha: float, step: float, slack: float = 1e-9):
    """Per direction, smallest and largest grid offsets (multiples of ``step``) that stab.

    The minus fraction is monotone in the offset, so the ends are located by
    integer bisection over grid indices instead of scanning every point.
    """
    lo_out, hi_out = [], []
    t = alpha - slack
    for th in thetas:
        n = np.array([-math.sin(th), math.cos(th)])
        proj = V @ n
        i0, i1 = int(math.floor(proj.min() / step)), int(math.ceil(proj.max() / step))

        def minus_ok(i):
            return percent_sides(V, th, i * step)[1][0] >= t

        def plus_ok(i):
            return percent_sides(V, th, i * step)[0][0] >= t

        a, b = i0, i1
        if not minus_ok(b):
            lo_out.append(math.inf)
            hi_out.append(-math.inf)
            continue
        while b - a > 1:
            m = (a + b) // 2
            if minus_ok(m):
                b = m
            else:
                a = m
        lo = b
        a, b = i0, i1
        if not plus_ok(a):
            lo_out.append(math.inf)
            hi_out.append(-math.inf)
            continue
        while b - a > 1:
            m = (a + b) // 2
            if plus_ok(m):
                a = m
            else:
                b = m
        lo_out.append(lo * step)
        hi_out.append(a * step)
    return np.array(lo_out), np.array(hi_out)


def brute_force_pair_stab(Va, Vb, alpha, thetas, step=2e-3):
    """Per direction: does some grid offset stab both sets."""
    out = []
    for th in thetas:
        n = np.array([-math.sin(th), math.cos(th)])
        pa, pb = Va @ n, Vb @ n
        lo, hi = max(pa.min(), pb.min()), min(pa.max(), pb.max())
        if lo > hi:
            out.append(False)
            continue
        grid = np.arange(lo, hi + step, step)
        ok = grid_stab_offsets(Va, th, alpha, grid) & grid_stab_offsets(Vb, th, alpha, grid)
        out.append(bool(ok.any()))
    return np.array(out)


__all__ = ["shp", "box", "halfplane_box", "shapely_side_area", "area_below", "percent_sides",
           "monte_carlo_disjoint", "grid_stab_offsets", "grid_thresholds", "brute_force_pair_stab"]


def first_nonzero_failures(n: int, balanced, hadwiger, make_vector):
    """Pairs x < y (both balanced and Hadwiger) with different first nonzero entries.

    Enumerates every coloring in {0,1,2}^n and every sign vector in {-1,0,1}^n.
    """
    from itertools import product

    signs = np.array(list(product((-1, 0, 1), repeat=n)), dtype=int)
    nz = signs != 0
    first = np.where(nz.any(axis=1), signs[np.arange(len(signs)), nz.argmax(axis=1)], 0)
    failures = []
    checked = 0
    for coloring in product(range(3), repeat=n):
        keep = [k for k, s in enumerate(signs) if balanced(make_vector(s, coloring)) and hadwiger(make_vector(s, coloring))]
        if not keep:
            continue
        S = signs[keep]
        F = first[keep]
        # x < y  iff  every nonzero x_i equals y_i
        ok = ((S[:, None, :] == 0) | (S[:, None, :] == S[None, :, :])).all(axis=2)
        checked += int(ok.sum())
        bad = ok & (F[:, None] != F[None, :])
        for i, j in zip(*np.nonzero(bad)):
            failures.append((coloring, tuple(S[i]), tuple(S[j])))
    return failures, checked


def shapely_ordered(shapes, theta: float, s: float, tol: float = 1e-9) -> bool:
    """Witness-chain order of the chords cut by the line, computed with shapely."""
    from shapely.geometry import LineString

    d = np.array([math.cos(theta), math.sin(theta)])
    n = np.array([-math.sin(theta), math.cos(theta)])
    foot = s * n
    seg = LineString([tuple(foot - 1e4 * d), tuple(foot + 1e4 * d)])
    cur = -math.inf
    for poly in shapes:
        inter = seg.intersection(shp(poly))
        if inter.is_empty:
            return False
        ts = [float(np.dot(np.array(c) - foot, d)) for c in inter.coords]
        cur = max(cur, min(ts))
        if cur > max(ts) + tol:
            return False
    return True


def grid_transversals(shapes, alpha: float, directions: int = 720, step: float = 1e-2, ordered: bool = False):
    """All (theta, s) grid points whose line stabs every shape (percent area of itself)."""
    hits = []
    for th in np.linspace(0, 2 * math.pi, directions, endpoint=False):
        n = np.array([-math.sin(th), math.cos(th)])
        lo = max((p.array @ n).min() for p in shapes)
        hi = min((p.array @ n).max() for p in shapes)
        if lo > hi:
            continue
        grid = np.arange(lo, hi + step, step)
        ok = np.ones(len(grid), dtype=bool)
        for p in shapes:
            ok &= grid_stab_offsets(p.array, th, alpha, grid)
        for s in grid[ok]:
            if not ordered or shapely_ordered(shapes, th, s):
                hits.append((th, s))
    return hits
