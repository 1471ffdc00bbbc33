"""Quantitative stabbing: stabber predicates, reduced sets, direction sweeps.

A line stabs an entry when the functional of each closed side of the entry
is at least the entry's threshold. For a fixed direction the stabbing offsets
of one entry form an interval (the minus-side value grows with the offset,
the plus-side value shrinks), so a direction admits a common stabbing line
exactly when the per-entry intervals intersect. The sweep below finds such
directions on a grid and zooms in on near misses.

Absence of a result means "none found at this resolution", never a proof.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from . import geometry as geo
from .arcs import ArcSet, from_samples
from .functionals import AREA, FunctionalSpec, PERCENT_AREA, effective_polygon, evaluate, profile_batch
from .geometry import ConvexPolygon, DirectedLine, Interval

EPS_ROOT = 1e-10
EPS_ANG = 1e-6
DEFAULT_DIRECTIONS = 720
CERT_DIRECTIONS = 2048
ORDER_GRID = 64
GAP_TOL = 4 * EPS_ROOT
MAX_REFINE = 16

STAB = "stab"
STAB_ORDERED = "stab_ordered"
SEPARATION = "separation"
SEPARATION_ORDERED = "separation_ordered"


class PreconditionError(ValueError):
    pass


def max_workers() -> int:
    try:
        return max(1, int(os.environ.get("QH_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class FamilyEntry:
    shape: ConvexPolygon
    functional: FunctionalSpec
    alpha: float
    color: Optional[str] = None
    label: str = ""

    def __post_init__(self):
        if self.shape.is_empty:
            raise ValueError(f"entry {self.label!r} has an empty shape")
        if not self.alpha > 0:
            raise ValueError(f"entry {self.label!r}: alpha must be positive")

    @cached_property
    def effective(self) -> ConvexPolygon:
        return effective_polygon(self.functional, self.shape)

    @cached_property
    def total(self) -> float:
        return evaluate(self.functional, self.shape)

    @property
    def threshold(self) -> float:
        """Alpha lowered by the closed-comparison slack."""
        return self.alpha - geo.EPS_AREA * max(1.0, abs(self.alpha))

    def cut_value(self, line: DirectedLine, side: str) -> float:
        f = self.functional
        if f.kind == PERCENT_AREA:
            return geo.area(geo.clip_halfplane(self.effective, line, side)) / geo.area(f.base)
        return evaluate(f, geo.clip_halfplane(self.shape, line, side))


@dataclass(frozen=True)
class Family:
    entries: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))

    @classmethod
    def uniform(cls, shapes: Sequence[ConvexPolygon], alpha: float,
                functional: Optional[FunctionalSpec] = None, colors=None, labels=None) -> "Family":
        """One functional and threshold for every set.

        Without ``functional`` each set gets the percent-area functional of itself.
        """
        entries = []
        for i, shape in enumerate(shapes):
            f = functional if functional is not None else FunctionalSpec.percent_area_of(shape)
            entries.append(FamilyEntry(
                shape, f, alpha,
                color=None if colors is None else colors[i],
                label=str(i + 1) if labels is None else labels[i],
            ))
        return cls(tuple(entries))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i) -> FamilyEntry:
        return self.entries[i]

    def subfamily(self, indices) -> "Family":
        return Family(tuple(self.entries[i] for i in indices))

    @cached_property
    def disjoint_matrix(self) -> np.ndarray:
        n = len(self)
        m = np.ones((n, n), dtype=bool)
        for i, j in combinations(range(n), 2):
            m[i, j] = m[j, i] = geo.disjoint(self.entries[i].shape, self.entries[j].shape)
        np.fill_diagonal(m, False)
        return m

    def is_disjoint(self, indices=None) -> bool:
        idx = range(len(self)) if indices is None else indices
        return all(self.disjoint_matrix[i, j] for i, j in combinations(idx, 2))

    @property
    def pairwise_disjoint(self) -> bool:
        return self.is_disjoint()

    @cached_property
    def center(self) -> np.ndarray:
        return np.vstack([e.shape.array for e in self.entries]).mean(axis=0)

    @cached_property
    def radius(self) -> float:
        pts = np.vstack([e.shape.array for e in self.entries])
        return float(np.hypot(*(pts - self.center).T).max())

    def colors(self) -> list:
        return [e.color for e in self.entries]


@dataclass(frozen=True)
class ReducedSet:
    original: FamilyEntry
    direction: float
    slab: Interval
    shape: ConvexPolygon


# -- per-entry offset thresholds ----------------------------------------------

def _first_true(pred, a: np.ndarray, b: np.ndarray, tol: float) -> np.ndarray:
    """Bisection for ``inf{s : pred(s)}`` per column; needs pred(a) false, pred(b) true."""
    width = float(np.max(b - a)) if len(a) else 0.0
    if width <= tol:
        return b
    for _ in range(int(math.ceil(math.log2(width / tol)))):
        mid = 0.5 * (a + b)
        ok = pred(mid)
        b = np.where(ok, mid, b)
        a = np.where(ok, a, mid)
    return b


def _lower_thresholds(entry: FamilyEntry, N: np.ndarray, tol: float) -> np.ndarray:
    """Smallest offsets whose minus side reaches the threshold (``+inf`` if none)."""
    poly = entry.effective
    m = len(N)
    if entry.total < entry.threshold or poly.is_empty:
        return np.full(m, np.inf)
    proj = poly.array @ N.T
    smin, smax = proj.min(axis=0), proj.max(axis=0)

    def pred(n):
        return lambda s: profile_batch(entry.functional, poly, n, s) >= entry.threshold

    out = smin.copy()
    todo = ~pred(N)(smin)
    if not todo.any():
        return out
    Nt = N[todo]
    if entry.functional.kind in (AREA, PERCENT_AREA):
        out[todo] = _quadratic_thresholds(entry, poly, Nt, proj[:, todo], pred, tol)
    else:
        out[todo] = _first_true(pred(Nt), smin[todo], smax[todo], tol)
    return out


def _quadratic_thresholds(entry, poly, N, proj, pred, tol):
    # Area below an offset is quadratic between consecutive vertex levels:
    # locate the bracketing levels, solve, then polish on a tight bracket.
    k, m = proj.shape
    levels = np.sort(proj, axis=0)
    F = profile_batch(entry.functional, poly, np.tile(N, (k, 1)), levels.reshape(-1)).reshape(k, m)
    t = entry.threshold
    j = np.clip(np.argmax(F >= t, axis=0), 1, k - 1)
    j = np.where((F >= t).any(axis=0), j, k - 1)
    cols = np.arange(m)
    a, b = levels[j - 1, cols], levels[j, cols]
    fa, fb = F[j - 1, cols], F[j, cols]
    fm = profile_batch(entry.functional, poly, N, 0.5 * (a + b))
    gamma = 2.0 * (fb - 2.0 * fm + fa)
    beta = fb - fa - gamma
    rhs = np.maximum(t - fa, 0.0)
    disc = np.sqrt(np.maximum(beta * beta + 4.0 * gamma * rhs, 0.0))
    denom = beta + disc
    x = np.clip(np.where(denom > 0, 2.0 * rhs / np.where(denom > 0, denom, 1.0), 1.0), 0.0, 1.0)
    root = a + x * (b - a)
    delta = 8.0 * tol
    lo_b = np.maximum(a, root - delta)
    hi_b = np.minimum(b, root + delta)
    good = ~pred(N)(lo_b) & pred(N)(hi_b)
    lo_b = np.where(good, lo_b, proj.min(axis=0))
    hi_b = np.where(good, hi_b, proj.max(axis=0))
    return _first_true(pred(N), lo_b, hi_b, tol)


def stab_thresholds(entry: FamilyEntry, thetas, tol: float = EPS_ROOT):
    """Raw offset thresholds ``(lo, hi)`` of ``entry`` for each direction.

    ``lo`` is where the minus side starts to reach alpha and ``hi`` where the
    plus side stops reaching it; the stabbing offsets are ``[lo, hi]``, empty
    when ``lo > hi``. Both ends are returned on their feasible side.
    """
    N = geo.normals(np.atleast_1d(np.asarray(thetas, dtype=float)))
    lo = _lower_thresholds(entry, N, tol)
    hi = -_lower_thresholds(entry, -N, tol)
    return lo, hi


def stab_offset_interval(entry: FamilyEntry, theta: float, tol: float = EPS_ROOT) -> Interval:
    lo, hi = stab_thresholds(entry, [theta], tol)
    return Interval(float(lo[0]), float(hi[0]))


def reduced_set(entry: FamilyEntry, theta: float, tol: float = EPS_ROOT) -> ReducedSet:
    slab = stab_offset_interval(entry, theta, tol)
    if slab.is_empty:
        return ReducedSet(entry, theta, slab, geo.EMPTY)
    shape = geo.clip_halfplane(entry.shape, DirectedLine(theta, slab.lo), geo.PLUS)
    shape = geo.clip_halfplane(shape, DirectedLine(theta, slab.hi), geo.MINUS)
    return ReducedSet(entry, theta, slab, shape)


# -- predicates ------------------------------------------------------------------

def is_stabber(line: DirectedLine, entry: FamilyEntry) -> bool:
    t = entry.threshold
    return entry.cut_value(line, geo.PLUS) >= t and entry.cut_value(line, geo.MINUS) >= t


def crossing_order(line: DirectedLine, entries: Sequence[FamilyEntry], tol: float = geo.EPS_GEO) -> bool:
    """Whether witness points ``t_1 <= ... <= t_n`` exist along the line."""
    t = -math.inf
    for e in entries:
        iv = geo.line_poly_parameter_interval(e.shape, line)
        if iv.is_empty:
            raise ValueError(f"line misses entry {e.label!r}")
        t = max(t, iv.lo)
        if t > iv.hi + tol:
            return False
    return True


def is_transversal(line: DirectedLine, family, ordered: bool = False) -> bool:
    entries = list(family)
    if not all(is_stabber(line, e) for e in entries):
        return False
    if ordered:
        try:
            return crossing_order(line, entries)
        except ValueError:
            return False
    return True


def _deficient(entry: FamilyEntry, line: DirectedLine, side: str) -> bool:
    return entry.cut_value(line, side) < entry.threshold


def is_separation_line(line: DirectedLine, entry_i: FamilyEntry, entry_j: FamilyEntry) -> bool:
    P, M = geo.PLUS, geo.MINUS
    return ((_deficient(entry_i, line, P) and _deficient(entry_j, line, M))
            or (_deficient(entry_i, line, M) and _deficient(entry_j, line, P)))


def separation_certificate(line: DirectedLine, a: FamilyEntry, b: FamilyEntry, c: FamilyEntry,
                           check_disjoint: bool = True) -> bool:
    """Whether ``line`` puts ``a`` and ``c`` on one side and ``b`` on the other.

    For pairwise disjoint sets this rules out any stabbing line meeting them
    in the order a, b, c. The implication fails for overlapping sets, so they
    are rejected unless ``check_disjoint`` is off.
    """
    if check_disjoint:
        for x, y in ((a, b), (b, c), (a, c)):
            if not geo.disjoint(x.shape, y.shape):
                raise PreconditionError(f"sets {x.label!r} and {y.label!r} overlap")
    P, M = geo.PLUS, geo.MINUS
    return ((_deficient(a, line, P) and _deficient(b, line, M) and _deficient(c, line, P))
            or (_deficient(a, line, M) and _deficient(b, line, P) and _deficient(c, line, M)))


# -- sweeps ------------------------------------------------------------------------

def direction_grid(directions: int) -> np.ndarray:
    return geo.TWO_PI * np.arange(directions) / directions


class StabTable:
    """Offset thresholds of every entry on a uniform direction grid.

    Directions ``theta`` and ``theta + pi`` give the same lines with sides
    swapped, so for an even grid only half is computed and the rest mirrored.
    """

    def __init__(self, family: Family, directions: int = DEFAULT_DIRECTIONS, tol: float = EPS_ROOT):
        if directions < 8:
            raise ValueError("need at least 8 directions")
        self.family = family
        self.directions = directions
        self.tol = tol
        self.thetas = direction_grid(directions)
        half = directions // 2 if directions % 2 == 0 else directions
        work = self.thetas[:half]
        workers = max_workers()
        if workers > 1 and len(family) > 1:
            with ThreadPoolExecutor(workers) as pool:
                rows = list(pool.map(lambda e: stab_thresholds(e, work, tol), family.entries))
        else:
            rows = [stab_thresholds(e, work, tol) for e in family.entries]
        lo = np.array([r[0] for r in rows]).reshape(len(family), half)
        hi = np.array([r[1] for r in rows]).reshape(len(family), half)
        if half != directions:
            lo, hi = np.concatenate([lo, -hi], axis=1), np.concatenate([hi, -lo], axis=1)
        self.lo, self.hi = lo, hi

    @property
    def step(self) -> float:
        return geo.TWO_PI / self.directions

    def gap(self, indices) -> np.ndarray:
        idx = list(indices)
        return self.lo[idx].max(axis=0) - self.hi[idx].min(axis=0)


def _try_direction(entries, theta, L, R, ordered, disjoint_sub, grid=ORDER_GRID):
    if L <= R:
        mid = 0.5 * (L + R)
        offsets = [mid]
        if ordered and not disjoint_sub and R > L:
            offsets += [s for s in np.linspace(L, R, grid) if s != mid]
    else:
        offsets = [0.5 * (L + R)]
    for s in offsets:
        line = DirectedLine(theta, s)
        if is_transversal(line, entries, ordered):
            return line
    return None


def find_transversal_in_direction(family, theta: float, ordered: bool = False,
                                  grid: int = ORDER_GRID, tol: float = EPS_ROOT) -> Optional[DirectedLine]:
    family = family if isinstance(family, Family) else Family(tuple(family))
    L, R = -math.inf, math.inf
    for e in family:
        iv = stab_offset_interval(e, theta, tol)
        L, R = max(L, iv.lo), min(R, iv.hi)
    if L - R > GAP_TOL:
        return None
    return _try_direction(list(family), theta, L, R, ordered, family.pairwise_disjoint, grid)


def _refine(family, idx, theta, step, ordered, disjoint_sub, tol, radius):
    entries = [family[i] for i in idx]
    a, b = theta - step, theta + step
    for _ in range(60):
        ts = np.linspace(a, b, 9)
        rows = [stab_thresholds(e, ts, tol) for e in entries]
        L = np.max([r[0] for r in rows], axis=0)
        R = np.min([r[1] for r in rows], axis=0)
        gap = L - R
        j = int(np.argmin(gap))
        if gap[j] <= GAP_TOL:
            line = _try_direction(entries, float(ts[j]), float(L[j]), float(R[j]), ordered, disjoint_sub)
            if line is not None:
                return line
        elif gap[j] > 1.5 * radius * (ts[1] - ts[0]) + GAP_TOL:
            return None
        a, b = ts[max(j - 1, 0)], ts[min(j + 1, 8)]
        if b - a < 1e-15:
            break
    return None


def search(table: StabTable, indices=None, ordered: bool = False, refine: bool = True) -> Optional[DirectedLine]:
    """First transversal of the indexed subfamily (in that order) on the table's grid."""
    family = table.family
    idx = list(range(len(family))) if indices is None else list(indices)
    entries = [family[i] for i in idx]
    disjoint_sub = family.is_disjoint(idx)
    L = table.lo[idx].max(axis=0)
    R = table.hi[idx].min(axis=0)
    gap = L - R
    for k in np.flatnonzero(gap <= GAP_TOL):
        line = _try_direction(entries, float(table.thetas[k]), float(L[k]), float(R[k]), ordered, disjoint_sub)
        if line is not None:
            return line
    if not refine:
        return None
    sub = family.subfamily(idx)
    # gap is 2*radius-Lipschitz in theta; beyond this bound no zero can hide
    bound = 2.0 * sub.radius * table.step + GAP_TOL
    left, right = np.roll(gap, 1), np.roll(gap, -1)
    cand = np.flatnonzero((gap <= left) & (gap <= right) & (gap > GAP_TOL) & (gap <= bound))
    cand = sorted(cand, key=lambda k: (gap[k], k))[:MAX_REFINE]
    for k in cand:
        line = _refine(family, idx, float(table.thetas[k]), table.step, ordered, disjoint_sub,
                       table.tol, sub.radius)
        if line is not None:
            return line
    return None


def find_transversal(family, ordered: bool = False, directions: int = DEFAULT_DIRECTIONS,
                     refine: bool = True) -> Optional[DirectedLine]:
    """Sweep ``directions`` angles for a common stabbing line.

    ``None`` means none was found at this resolution.
    """
    family = family if isinstance(family, Family) else Family(tuple(family))
    if len(family) == 0:
        raise ValueError("empty family")
    return search(StabTable(family, directions), ordered=ordered, refine=refine)


# -- direction arcs ------------------------------------------------------------

def _pair_member(mode, lo_i, hi_i, lo_j, hi_j):
    if mode in (STAB, STAB_ORDERED):
        return np.maximum(lo_i, lo_j) <= np.minimum(hi_i, hi_j)
    if mode == SEPARATION:
        return (hi_i < lo_j) | (hi_j < lo_i)
    if mode == SEPARATION_ORDERED:
        # some line with i on its left side and j on its right side
        return hi_j < lo_i
    raise ValueError(f"unknown mode {mode!r}")


def _ordered_ok(ei, ej, theta, lo, hi, disjoint_pair) -> bool:
    return _try_direction([ei, ej], theta, lo, hi, True, disjoint_pair) is not None


def pair_direction_arcs(entry_i: FamilyEntry, entry_j: FamilyEntry, mode: str = STAB,
                        directions: int = DEFAULT_DIRECTIONS, eps_ang: float = EPS_ANG) -> ArcSet:
    """Directions in which the pair is stabbed / separated, as an arc set.

    Membership is sampled on a grid and each boundary is refined by angular
    bisection to ``eps_ang``.
    """
    pair = Family((entry_i, entry_j))
    disjoint_pair = pair.pairwise_disjoint
    table = StabTable(pair, directions)
    (lo_i, lo_j), (hi_i, hi_j) = table.lo, table.hi
    member = _pair_member(mode, lo_i, hi_i, lo_j, hi_j)
    if mode == STAB_ORDERED:
        for k in np.flatnonzero(member):
            L, R = max(lo_i[k], lo_j[k]), min(hi_i[k], hi_j[k])
            member[k] = _ordered_ok(entry_i, entry_j, table.thetas[k], L, R, disjoint_pair)

    def at(thetas):
        (a_lo, a_hi), (b_lo, b_hi) = stab_thresholds(entry_i, thetas), stab_thresholds(entry_j, thetas)
        ok = _pair_member(mode, a_lo, a_hi, b_lo, b_hi)
        if mode == STAB_ORDERED:
            for k in np.flatnonzero(ok):
                L, R = max(a_lo[k], b_lo[k]), min(a_hi[k], b_hi[k])
                ok[k] = _ordered_ok(entry_i, entry_j, thetas[k], L, R, disjoint_pair)
        return ok

    return from_samples(table.thetas, member, _boundary_bisector(at, eps_ang), batched=True)


def _boundary_bisector(members_at, eps_ang):
    """Refine all boundaries together; ``members_at`` maps an angle array to flags."""
    def boundary(t_in, t_out):
        t_in, t_out = t_in.copy(), t_out.copy()
        while np.any(np.abs(t_out - t_in) > eps_ang):
            mid = 0.5 * (t_in + t_out)
            ok = members_at(mid)
            t_in = np.where(ok, mid, t_in)
            t_out = np.where(ok, t_out, mid)
        return 0.5 * (t_in + t_out)
    return boundary


def ordered_separation_sets(family: Family, directions: int = DEFAULT_DIRECTIONS,
                            eps_ang: float = EPS_ANG):
    """Directions separating some pair ``i < j`` with ``i`` left / right of ``j``.

    Returns ``(S1, S2)``: in ``S1`` the earlier set of a separated pair lies on
    the left of a separating line, in ``S2`` on the right. Rotating by ``pi``
    maps one onto the other.
    """
    table = StabTable(family, directions)
    pairs = list(combinations(range(len(family)), 2))

    def member(lo, hi, first_left):
        out = np.zeros(lo.shape[1], dtype=bool)
        for i, j in pairs:
            a, b = (i, j) if first_left else (j, i)
            out |= hi[b] < lo[a]
        return out

    def at(thetas, first_left):
        rows = [stab_thresholds(e, thetas) for e in family]
        lo = np.array([r[0] for r in rows])
        hi = np.array([r[1] for r in rows])
        return member(lo, hi, first_left)

    out = []
    for first_left in (True, False):
        flags = member(table.lo, table.hi, first_left)
        out.append(from_samples(table.thetas, flags,
                                _boundary_bisector(lambda t, fl=first_left: at(t, fl), eps_ang), batched=True))
    return tuple(out)


def certify_gap_positive(table: StabTable, indices=None, exclude=(), eps: float = EPS_ANG,
                         max_intervals: int = 200000) -> Optional[float]:
    """Check that no direction outside ``eps`` of ``exclude`` admits a common stabbing line.

    Uses that the gap ``max lo - min hi`` is ``2R``-Lipschitz in the angle:
    between samples ``t0, t1`` with gaps ``g0, g1`` it stays positive when
    ``g0 + g1 > 2R (t1 - t0)``. Undecided pieces are bisected. Returns
    ``None`` on success, otherwise an angle where positivity could not be shown.
    """
    family = table.family
    idx = list(range(len(family))) if indices is None else list(indices)
    entries = [family[i] for i in idx]
    lip = 2.0 * family.subfamily(idx).radius

    def gap_at(t):
        rows = [stab_thresholds(e, [t], table.tol) for e in entries]
        return max(r[0][0] for r in rows) - min(r[1][0] for r in rows)

    def excluded(t0, t1):
        return any(abs(math.remainder(t - e, geo.TWO_PI)) <= eps for e in exclude for t in (t0, t1)) \
            or any(t0 <= e + k * geo.TWO_PI <= t1 for e in exclude for k in (-1, 0, 1))

    g = table.gap(idx)
    th = list(table.thetas) + [geo.TWO_PI]
    gs = list(g) + [g[0]]
    stack = [(th[k], th[k + 1], gs[k], gs[k + 1]) for k in range(len(g))]
    count = 0
    while stack:
        t0, t1, g0, g1 = stack.pop()
        if g0 + g1 > lip * (t1 - t0) + 2 * GAP_TOL:
            continue
        if t1 - t0 <= eps and excluded(t0, t1):
            continue
        count += 1
        if count > max_intervals or t1 - t0 < 1e-13:
            return t0
        tm = 0.5 * (t0 + t1)
        gm = gap_at(tm)
        if gm <= GAP_TOL and not excluded(tm, tm):
            return tm
        stack.append((t0, tm, g0, gm))
        stack.append((tm, t1, gm, g1))
    return None
