"""Constructions, random generators and theorem checkers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations, permutations
from typing import Optional

import numpy as np

from . import geometry as geo
from .colorful import COLORS, Color, color_classes, find_monochromatic_transversal, rainbow_triples
from .functionals import FunctionalSpec, evaluate
from .geometry import ConvexPolygon, DirectedLine, Point2
from .stabbing import (CERT_DIRECTIONS, DEFAULT_DIRECTIONS, EPS_ANG, EPS_ROOT, Family,
                       FamilyEntry, StabTable, certify_gap_positive, is_transversal, search,
                       stab_offset_interval)

MAX_SUBFAMILIES = 400
EXHAUSTIVE_LIMIT = 12


class CertificationError(RuntimeError):
    """A construction failed one of its self-checks; the message names the clause."""


class GenerationError(RuntimeError):
    pass


# -- rectangle gauges ----------------------------------------------------------

@dataclass(frozen=True)
class RectangleGauge:
    rect: ConvexPolygon
    midline: DirectedLine
    p_plus: Point2
    p_minus: Point2


def _rectangle_axes(rect: ConvexPolygon):
    vs = rect.array
    if len(vs) != 4:
        raise ValueError("not a rectangle: need 4 vertices")
    edges = np.roll(vs, -1, axis=0) - vs
    lengths = np.hypot(edges[:, 0], edges[:, 1])
    for k in range(4):
        e, f = edges[k], edges[(k + 1) % 4]
        if abs(e @ f) > 1e-9 * lengths[k] * lengths[(k + 1) % 4]:
            raise ValueError("not a rectangle: corners are not right angles")
    k = 0 if lengths[0] >= lengths[1] else 1
    axis = edges[k] / lengths[k]
    phi = math.atan2(axis[1], axis[0])
    # orient the long axis into [-pi/4, 3pi/4)
    if not (-math.pi / 4 - 1e-12 <= phi < 3 * math.pi / 4 - 1e-12):
        axis = -axis
    return vs.mean(axis=0), axis, lengths[k], lengths[1 - k]


def gauge_points(rect: ConvexPolygon, alpha: float) -> RectangleGauge:
    """Midline points at fractions ``alpha`` and ``1 - alpha`` of the long axis."""
    if not 0 < alpha < 0.5:
        raise ValueError("alpha must lie in (0, 0.5)")
    c, axis, length, _ = _rectangle_axes(rect)
    start = c - 0.5 * length * axis
    p_minus = start + alpha * length * axis
    p_plus = start + (1 - alpha) * length * axis
    mid = DirectedLine.through(Point2(*start), Point2(*(c + 0.5 * length * axis)))
    return RectangleGauge(rect, mid, Point2(*p_plus), Point2(*p_minus))


def admissible_angle_range(gauge: RectangleGauge, point: Point2) -> float:
    """Largest tilt away from the short-axis direction for a line through ``point`` that misses the short sides.

    Admissible directions are ``gauge.midline.theta + pi/2 + d`` with ``|d|`` at most the returned value.
    """
    c, axis, length, width = _rectangle_axes(gauge.rect)
    t = abs((np.asarray(point) - c) @ axis)
    reach = 0.5 * length - t
    return math.atan2(reach, 0.5 * width)


# -- the four-rectangle construction -------------------------------------------

@dataclass(frozen=True)
class CounterexampleParams:
    unit: float = 1.0
    delta: float = 0.05
    alpha: float = 0.3
    length: float = 20.0
    width: float = 4.0
    shift: float = 1.0
    rect3_width: float = 4.0
    rect3_height: float = 10.0


def _quantitative_rects(p: CounterexampleParams):
    u, a, L, W = p.unit, p.alpha, p.length, p.width
    R = ConvexPolygon.rectangle
    # gauge points p1-, p2+, p4- sit on the vertical line x = 0
    r1 = R(-a * L * u, (p.shift - W / 2) * u, (1 - a) * L * u, (p.shift + W / 2) * u)
    r2 = R(-(1 - a) * L * u, -W / 2 * u, a * L * u, W / 2 * u)
    r4 = R(-a * L * u, (-p.shift - W / 2) * u, (1 - a) * L * u, (-p.shift + W / 2) * u)
    # rectangle 3 stands just right of that line
    r3 = R(p.delta * u, -p.rect3_height / 2 * u, (p.delta + p.rect3_width) * u, p.rect3_height / 2 * u)
    return [r1, r2, r3, r4]


def named_lines(params: CounterexampleParams = CounterexampleParams()) -> dict:
    """The lines serving the four triples of the construction (0-based keys)."""
    r = _quantitative_rects(params)
    g = [gauge_points(x, params.alpha) for x in r]
    v = DirectedLine.through(g[3].p_minus, g[0].p_minus)
    h = DirectedLine.through(g[1].p_plus, g[2].p_plus)
    m3 = DirectedLine.through(g[2].p_minus, g[2].p_plus)
    d24 = DirectedLine.through(g[1].p_plus, g[3].p_plus)
    return {"v": v, "h": h, "m3": m3, "d24": d24}


def _oriented(line, family, idx):
    """The orientation of ``line`` meeting ``idx`` in order, if any."""
    sub = family.subfamily(idx)
    for cand in (line, line.reversed()):
        if is_transversal(cand, sub, ordered=True):
            return cand
    return None


def _check_unique_direction(table: StabTable, idx, expected, width_tol: float):
    bad = certify_gap_positive(table, idx, exclude=expected)
    if bad is not None:
        raise CertificationError(f"clause 'v unique': cannot exclude direction {bad:.9f}")
    sub = table.family.subfamily(idx)
    for e in expected:
        ivs = [stab_offset_interval(x, e) for x in sub]
        if min(iv.hi for iv in ivs) - max(iv.lo for iv in ivs) > width_tol:
            raise CertificationError("clause 'v unique': offset interval at v is not a single line")


def certify_quantitative(family: Family, params: CounterexampleParams,
                         directions: int = CERT_DIRECTIONS) -> dict:
    """Run every self-check of the four-rectangle construction; returns the witness lines."""
    lines = named_lines(params)
    v, h, m3, d24 = lines["v"], lines["h"], lines["m3"], lines["d24"]
    if not is_transversal(v, family.subfamily([0, 1, 3])):
        raise CertificationError("clause 'v stabs 1,2,4' failed")
    if is_transversal(v, family.subfamily([2])):
        raise CertificationError("clause 'v misses 3' failed")
    table = StabTable(family, directions)
    _check_unique_direction(table, [0, 1, 3], (math.pi / 2, 3 * math.pi / 2), 1e-6 * params.unit)
    h = _oriented(h, family, [0, 1, 2])
    if h is None:
        raise CertificationError("clause 'h meets 1,2,3 in order' failed")
    if not is_transversal(m3, family.subfamily([0, 2, 3])):
        raise CertificationError("clause 'midline of 3 stabs 1,3,4' failed")
    d24 = _oriented(d24, family, [1, 2, 3])
    if d24 is None:
        raise CertificationError("clause 'p2+ p4+ line meets 2,3,4 in order' failed")
    witnesses = {}
    for tri in combinations(range(4), 3):
        for perm in permutations(tri):
            line = search(table, perm, ordered=True)
            if line is None:
                raise CertificationError(f"clause 'ordered triple {tuple(i + 1 for i in perm)}' failed")
            witnesses[perm] = line
    if search(table) is not None:
        raise CertificationError("clause 'no common transversal' failed")
    if family.pairwise_disjoint:
        raise CertificationError("clause 'not pairwise disjoint' failed")
    return {"v": v, "h": h, "m3": m3, "d24": d24, "triples": witnesses}


def build_quantitative_counterexample(params: CounterexampleParams = CounterexampleParams(),
                                      certify: bool = True) -> Family:
    """Four rectangles whose triples all have ordered transversals but the whole family has none."""
    fam = Family.uniform(_quantitative_rects(params), params.alpha)
    if certify:
        certify_quantitative(fam, params)
    return fam


def _shrink_short_axis(rect: ConvexPolygon, amount: float) -> ConvexPolygon:
    c, axis, length, width = _rectangle_axes(rect)
    if 2 * amount >= width:
        raise CertificationError("clause 'shrink below feature scale' failed")
    nrm = np.array([-axis[1], axis[0]])
    hl, hw = 0.5 * length, 0.5 * width - amount
    pts = [c + sx * hl * axis + sy * hw * nrm for sx, sy in ((-1, -1), (1, -1), (1, 1), (-1, 1))]
    return ConvexPolygon(tuple(Point2(float(x), float(y)) for x, y in pts))


COLORFUL_ORDER = (Color.BLUE, Color.GREEN, Color.RED)


def certify_colorful(family: Family, directions: int = CERT_DIRECTIONS) -> None:
    table = StabTable(family, directions)
    for tri in rainbow_triples(family.colors()):
        if search(table, tri, ordered=True) is None:
            labels = ",".join(family[i].label for i in tri)
            raise CertificationError(f"clause 'rainbow triple {labels}' failed")
    if find_monochromatic_transversal(family, table=table) is not None:
        raise CertificationError("clause 'no monochromatic transversal' failed")


def build_colorful_counterexample(epsilon: float = 0.01,
                                  params: CounterexampleParams = CounterexampleParams(),
                                  certify: bool = True) -> Family:
    """Twelve sets: blue copies of the four rectangles plus green and red shrinks.

    Only the short axis shrinks, by ``epsilon`` per long side for green and
    twice that for red, so every gauge point stays put.
    """
    if not epsilon > 0:
        raise CertificationError("clause 'epsilon positive' failed")
    rects = _quantitative_rects(params)
    shapes, colors, labels = [], [], []
    for i, r in enumerate(rects):
        for step, color in enumerate(COLORFUL_ORDER):
            shapes.append(r if step == 0 else _shrink_short_axis(r, step * epsilon * params.unit))
            colors.append(color.value)
            labels.append(f"{i + 1}{color.value[0]}")
    fam = Family.uniform(shapes, params.alpha, colors=colors, labels=labels)
    if certify:
        certify_colorful(fam)
    return fam


# -- random families -----------------------------------------------------------

def random_convex_polygon(rng: np.random.Generator, radius: float = 1.0, k=(3, 8)) -> ConvexPolygon:
    for _ in range(100):
        m = int(rng.integers(k[0], k[1] + 1))
        ang = np.sort(rng.uniform(0, geo.TWO_PI, m))
        r = radius * rng.uniform(0.6, 1.0, m)
        pts = np.c_[r * np.cos(ang), r * np.sin(ang)]
        stretch = rng.uniform(1.0, 2.5)
        phi = rng.uniform(0, math.pi)
        rot = np.array([[math.cos(phi), -math.sin(phi)], [math.sin(phi), math.cos(phi)]])
        pts = pts @ rot.T
        pts[:, 0] *= stretch
        pts = pts @ rot
        pts *= radius / np.hypot(pts[:, 0], pts[:, 1]).max()
        poly = ConvexPolygon(tuple(Point2(float(x), float(y)) for x, y in pts))
        if len(poly.vertices) >= 3 and geo.area(poly) > 0.05 * radius * radius:
            return poly
    raise GenerationError("could not sample a non-degenerate polygon")


def _place(poly: ConvexPolygon, at) -> ConvexPolygon:
    c = poly.array.mean(axis=0)
    return poly.translate(float(at[0] - c[0]), float(at[1] - c[1]))


def _make_family(shapes, rng, alpha, functional, colored) -> Family:
    entries = []
    colors = None
    if colored:
        colors = [COLORS[i % 3].value for i in range(len(shapes))]
        rng.shuffle(colors)
    for i, s in enumerate(shapes):
        if functional == "percent_area":
            f, a = FunctionalSpec.percent_area_of(s), alpha
        else:
            f = FunctionalSpec(functional)
            a = alpha * evaluate(f, s)
        entries.append(FamilyEntry(s, f, a, color=None if colors is None else colors[i], label=str(i + 1)))
    return Family(tuple(entries))


def random_family(seed: int, n: int, mode: str = "disjoint", alpha: float = 0.3,
                  functional: str = "percent_area", colored: bool = False,
                  spread: float = 1.0, margin: float = 0.1, radius=(0.5, 1.5),
                  budget: int = 2000) -> Family:
    """Seeded random family.

    ``threaded`` lays the sets along a planted line, each placed so the line
    stays inside its stabbing slab; ``spread`` above 1 lets placements drift
    past the slab so the planted line may fail. ``margin`` is the gap left
    between consecutive sets along the line.
    """
    if n < 1:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    shapes = [random_convex_polygon(rng, rng.uniform(*radius)) for _ in range(n)]
    if mode == "threaded":
        theta = rng.uniform(0, geo.TWO_PI)
        d, nrm = np.array(geo.direction(theta)), np.array(geo.normal(theta))
        origin = rng.uniform(-2, 2, 2)
        placed, t = [], 0.0
        probe = _make_family(shapes, np.random.default_rng(seed), alpha, functional, False)
        for i, s in enumerate(shapes):
            r = float(np.hypot(*(s.array - s.array.mean(axis=0)).T).max())
            if i:
                t += r
            iv = stab_offset_interval(probe[i], theta)
            c = s.array.mean(axis=0)
            # offset of the planted line relative to the centroid
            want = iv.midpoint - c @ nrm + spread * rng.uniform(-1, 1) * 0.5 * max(iv.length, 0.0)
            at = origin + t * d - want * nrm
            placed.append(_place(s, at))
            t += r + margin
        shapes = placed
    elif mode in ("disjoint", "overlapping"):
        rmax = radius[1]
        side = 3.0 * math.sqrt(n) * rmax if mode == "disjoint" else 1.5 * rmax
        placed = []
        tries = 0
        for s in shapes:
            while True:
                tries += 1
                if tries > budget:
                    raise GenerationError("rejection budget exhausted")
                cand = _place(s, rng.uniform(-side / 2, side / 2, 2))
                if mode == "overlapping" or all(geo.disjoint(cand, o) for o in placed):
                    placed.append(cand)
                    break
        shapes = placed
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return _make_family(shapes, rng, alpha, functional, colored)


def planted_line(seed: int, n: int, **kw) -> DirectedLine:
    """The line a ``threaded`` family was built around."""
    rng = np.random.default_rng(seed)
    radius = kw.get("radius", (0.5, 1.5))
    for _ in range(n):
        random_convex_polygon(rng, rng.uniform(*radius))
    theta = rng.uniform(0, geo.TWO_PI)
    origin = rng.uniform(-2, 2, 2)
    return DirectedLine.through_point(Point2(*origin), theta)


def separated_triple(seed: int, alpha: float = 0.3):
    """Disjoint ``A, B, C`` and a line leaving ``A, C`` on one side and ``B`` on the other."""
    rng = np.random.default_rng(seed)
    base = DirectedLine(0.0, 0.0)
    shapes = []
    for k, up in enumerate((True, False, True)):
        s = random_convex_polygon(rng, 1.0)
        s = _place(s, (3.0 * k, 0.0))
        ys = s.array[:, 1]
        # cross the line by less than an alpha share
        target = rng.uniform(0.0, 0.8) * alpha
        lo, hi = -ys.max(), -ys.min()
        side = geo.MINUS if up else geo.PLUS
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            frac = geo.area(geo.clip_halfplane(s.translate(0.0, mid), base, side)) / geo.area(s)
            if (frac > target) != up:
                hi = mid
            else:
                lo = mid
        dy = hi if up else lo
        shapes.append(s.translate(0.0, dy))
    phi = rng.uniform(0, geo.TWO_PI)
    shift = rng.uniform(-5, 5, 2)
    moved = [s.rotate(phi).translate(float(shift[0]), float(shift[1])) for s in shapes]
    line = DirectedLine.through_point(Point2(float(shift[0]), float(shift[1])), phi)
    fam = Family.uniform(moved, alpha, labels=["A", "B", "C"])
    return fam, line


def nondisjoint_configuration(alpha: float = 0.3):
    """Overlapping ``A, B, C`` split by ``l`` yet met in order by the line ``m``."""
    R = ConvexPolygon.rectangle
    fam = Family.uniform([R(0, -0.5, 2, 4), R(0, -3, 2, 0.5), R(0, -0.9, 2, 3)], alpha, labels=["A", "B", "C"])
    ell = DirectedLine(0.0, 0.0)
    m = DirectedLine.through(Point2(1.0, 4.0), Point2(1.0, -3.0))
    return fam, ell, m


# -- theorem checks ------------------------------------------------------------

THEOREMS = {
    "T1.1": dict(size=3, disjoint=True, colored=False, conclusion="unordered"),
    "T3.3": dict(size=4, disjoint=True, colored=False, conclusion="ordered"),
    "T3.2": dict(size=6, disjoint=False, colored=False, conclusion="ordered"),
    "T1.2": dict(size=3, disjoint=True, colored=True, conclusion="monochromatic"),
}


@dataclass
class VerificationReport:
    theorem_id: str
    hypothesis_holds: bool
    conclusion_holds: Optional[bool]
    witness: Optional[DirectedLine] = None
    witness_color: Optional[str] = None
    violations: list = field(default_factory=list)
    resolution: tuple = (DEFAULT_DIRECTIONS, EPS_ANG, EPS_ROOT)
    hypothesis_valid: bool = True
    note: str = ""
    subfamilies_checked: int = 0

    @property
    def status(self) -> str:
        if not self.hypothesis_valid:
            return "hypothesis invalid"
        if not self.hypothesis_holds:
            return "vacuous"
        return "upheld" if self.conclusion_holds else "violated"

    @property
    def violated(self) -> bool:
        return self.hypothesis_valid and self.hypothesis_holds and not self.conclusion_holds

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem_id,
            "status": self.status,
            "hypothesis_valid": self.hypothesis_valid,
            "hypothesis_holds": self.hypothesis_holds,
            "conclusion_holds": self.conclusion_holds,
            "witness": None if self.witness is None else {"theta": self.witness.theta, "offset": self.witness.offset},
            "witness_color": self.witness_color,
            "violations": [{"subfamily": [int(i) + 1 for i in idx], "detail": d} for idx, d in self.violations],
            "resolution": {"directions": self.resolution[0], "eps_ang": self.resolution[1],
                           "eps_root": self.resolution[2]},
            "subfamilies_checked": self.subfamilies_checked,
            "note": self.note,
        }


def hypothesis_subfamilies(family: Family, theorem_id: str, seed: int = 0) -> list:
    """Index tuples the hypothesis quantifies over, subsampled above 12 sets."""
    spec = THEOREMS[theorem_id]
    n = len(family)
    if spec["colored"]:
        subs = rainbow_triples(family.colors())
    elif n <= spec["size"]:
        subs = [tuple(range(n))]
    else:
        subs = None if n > EXHAUSTIVE_LIMIT else list(combinations(range(n), spec["size"]))
        if subs is None:
            rng = np.random.default_rng(seed)
            subs = sorted({tuple(sorted(rng.choice(n, spec["size"], replace=False).tolist()))
                           for _ in range(MAX_SUBFAMILIES)})
    if spec["colored"] and n > EXHAUSTIVE_LIMIT and len(subs) > MAX_SUBFAMILIES:
        rng = np.random.default_rng(seed)
        pick = rng.choice(len(subs), MAX_SUBFAMILIES, replace=False)
        subs = [subs[i] for i in sorted(pick)]
    return subs


def _validate(family: Family, theorem_id: str, allow_overlap: bool) -> Optional[str]:
    spec = THEOREMS[theorem_id]
    if spec["colored"]:
        try:
            classes = color_classes(family)
        except ValueError as exc:
            return f"coloring required: {exc}"
        if any(not v for v in classes.values()):
            return "all three colors must be present"
    if spec["disjoint"] and not allow_overlap and not family.pairwise_disjoint:
        return "sets must be pairwise disjoint (use allow_overlap to waive)"
    return None


def check_hypothesis(family: Family, theorem_id: str, allow_overlap: bool = False,
                     directions: int = DEFAULT_DIRECTIONS, table: Optional[StabTable] = None,
                     stop_early: bool = False, seed: int = 0):
    """``(holds, failing subfamilies, checked count)``; raises ``ValueError`` if the premises are invalid."""
    if theorem_id not in THEOREMS:
        raise ValueError(f"unknown theorem {theorem_id!r}")
    problem = _validate(family, theorem_id, allow_overlap)
    if problem:
        raise ValueError(problem)
    table = table or StabTable(family, directions)
    failing = []
    subs = hypothesis_subfamilies(family, theorem_id, seed)
    for idx in subs:
        if search(table, idx, ordered=True) is None:
            failing.append(idx)
            if stop_early:
                break
    return not failing, failing, len(subs)


def verify_theorem(family: Family, theorem_id: str, allow_overlap: bool = False,
                   directions: int = DEFAULT_DIRECTIONS, stop_early: bool = False,
                   seed: int = 0) -> VerificationReport:
    resolution = (directions, EPS_ANG, EPS_ROOT)
    if theorem_id not in THEOREMS:
        raise ValueError(f"unknown theorem {theorem_id!r}")
    problem = _validate(family, theorem_id, allow_overlap)
    if problem:
        return VerificationReport(theorem_id, False, None, resolution=resolution,
                                  hypothesis_valid=False, note=problem)
    table = StabTable(family, directions)
    holds, failing, checked = check_hypothesis(family, theorem_id, allow_overlap, table=table,
                                               stop_early=stop_early, seed=seed)
    report = VerificationReport(theorem_id, holds, None, resolution=resolution, subfamilies_checked=checked)
    report.violations = [(idx, "no ordered transversal found") for idx in failing]
    if not holds:
        return report
    kind = THEOREMS[theorem_id]["conclusion"]
    if kind == "monochromatic":
        hit = find_monochromatic_transversal(family, table=table)
        if hit is not None:
            report.witness_color, report.witness = hit[0].value, hit[1]
    else:
        report.witness = search(table, ordered=(kind == "ordered"))
    report.conclusion_holds = report.witness is not None
    if not report.conclusion_holds:
        report.violations.append((tuple(range(len(family))),
                                  f"none found at resolution M={directions}"))
    return report


@dataclass
class FuzzSummary:
    theorem_id: str
    trials: int
    counts: dict
    offenders: list

    def to_dict(self) -> dict:
        return {"theorem": self.theorem_id, "trials": self.trials, "counts": dict(self.counts),
                "offending_seeds": [s for s, _ in self.offenders]}


FUZZ_SIZES = {"T1.1": (3, 6), "T3.3": (4, 7), "T3.2": (6, 8), "T1.2": (6, 9)}


def fuzz_family(seed: int, theorem_id: str, mode: str = "mixed") -> Family:
    """Random family for one fuzz trial; ``mixed`` alternates threaded and scattered disjoint sets."""
    rng = np.random.default_rng(seed)
    lo, hi = FUZZ_SIZES[theorem_id]
    n = int(rng.integers(lo, hi + 1))
    colored = THEOREMS[theorem_id]["colored"]
    alpha = float(rng.uniform(0.1, 0.4))
    sub = mode
    if mode == "mixed":
        sub = "threaded" if seed % 2 == 0 else "disjoint"
    kw = dict(alpha=alpha, colored=colored)
    if sub == "threaded":
        kw.update(spread=float(rng.uniform(0.5, 3.0)), margin=float(rng.uniform(0.05, 0.5)))
    return random_family(seed, n, sub, **kw)


def fuzz(theorem_id: str, trials: int, seed: int = 0, mode: str = "mixed",
         directions: int = DEFAULT_DIRECTIONS, allow_overlap: bool = False) -> FuzzSummary:
    if trials < 1:
        raise ValueError("trials must be at least 1")
    counts = {"hypothesis-true": 0, "upheld": 0, "vacuous": 0, "violated": 0, "invalid": 0}
    offenders = []
    for t in range(trials):
        s = seed + t
        fam = fuzz_family(s, theorem_id, mode)
        rep = verify_theorem(fam, theorem_id, allow_overlap=allow_overlap, directions=directions,
                             stop_early=True)
        if rep.status == "hypothesis invalid":
            counts["invalid"] += 1
            continue
        if rep.hypothesis_holds:
            counts["hypothesis-true"] += 1
        counts[rep.status] += 1
        if rep.violated:
            offenders.append((s, fam))
    return FuzzSummary(theorem_id, trials, counts, offenders)
