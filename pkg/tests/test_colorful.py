import math
from itertools import product

import numpy as np
import pytest

from oracles import first_nonzero_failures, percent_sides
from qhadwiger import geometry as geo
from qhadwiger import scenarios as sc
from qhadwiger.colorful import (COLORS, Color, SignVector, classify_directions, color_class_stabbable,
                                find_monochromatic_transversal, first_nonzero, is_balanced, is_hadwiger,
                                middle_line, precedes, s1_s2_direction_sets, sign_vector, summarize)
from qhadwiger.geometry import ConvexPolygon, DirectedLine
from qhadwiger.stabbing import Family, FamilyEntry

R = ConvexPolygon.rectangle
r, g, b = Color.RED, Color.GREEN, Color.BLUE


def vec(*pairs):
    return SignVector.of(pairs)


def colored_stack(alpha=0.3):
    return Family.uniform([R(-1, 0, 1, 1), R(-1, 2, 1, 3), R(-1, 4, 1, 5)], alpha, colors=["red", "green", "blue"])


def vertical(x):
    return DirectedLine.through((x, 0), (x, 1))


class TestSignVector:
    def test_all_zero(self):
        assert sign_vector(vertical(0.0), colored_stack()).is_zero()

    def test_all_minus(self):
        x = sign_vector(DirectedLine(0.0, -100.0), colored_stack())
        assert x.signs == (-1, -1, -1)

    def test_all_plus(self):
        x = sign_vector(DirectedLine(0.0, 100.0), colored_stack())
        assert x.signs == (1, 1, 1)

    def test_colors_copied(self):
        assert sign_vector(vertical(0.0), colored_stack()).colors == (r, g, b)

    def test_uncolored_rejected(self):
        fam = Family.uniform([R(0, 0, 1, 1)], 0.3)
        with pytest.raises(ValueError):
            sign_vector(vertical(0.5), fam)

    def test_counterexample_v_against_oracle(self):
        fam = sc.build_colorful_counterexample(certify=False)
        v = sc.named_lines()["v"]
        x = sign_vector(v, fam)
        assert set(x.signs) - {0}
        for sgn, e in zip(x.signs, fam):
            plus, minus = percent_sides(e.shape.array, v.theta, v.offset)
            t = e.alpha - 1e-9
            expected = -1 if minus[0] < t else (1 if plus[0] < t else 0)
            assert sgn == expected

    def test_cases_exhaustive_random(self):
        rng = np.random.default_rng(0)
        for seed in range(100):
            fam = sc.random_family(seed, 3, "overlapping", colored=True)
            line = DirectedLine(rng.uniform(0, 2 * math.pi), rng.uniform(-2, 2))
            x = sign_vector(line, fam)
            for sgn, e in zip(x.signs, fam):
                plus, minus = percent_sides(e.shape.array, line.theta, line.offset)
                cases = [minus[0] < e.alpha - 1e-9,
                         minus[0] >= e.alpha - 1e-9 and plus[0] < e.alpha - 1e-9,
                         minus[0] >= e.alpha - 1e-9 and plus[0] >= e.alpha - 1e-9]
                assert sum(cases) == 1
                assert sgn == (-1, 1, 0)[cases.index(True)]


class TestMiddleLine:
    def test_symmetric_stack(self):
        line, x, summary = middle_line(colored_stack(), math.pi / 2)
        assert abs(line.offset) < 1e-6 and x.is_zero()

    def test_sentinel(self):
        shapes = [R(-1, 0, 1, 1), R(-1, 2, 1, 3), R(-1, 4, 1, 5)]
        entries = [FamilyEntry(s, colored_stack()[i].functional, a, color=c)
                   for i, (s, a, c) in enumerate(zip(shapes, (0.6, 0.3, 0.3), ("red", "green", "blue")))]
        fam = Family(tuple(entries))
        line, x, summary = middle_line(fam, math.pi / 2)
        assert summary.p[r] > summary.q[r]
        assert math.isfinite(line.offset)
        assert summary.p[r] == pytest.approx(-summary.q[r])

    def test_hand_sorted_intervals(self):
        colors = [r, g, b, r]
        lo, hi = [0, 1, 2, 1], [5, 3, 6, 4]
        s = summarize(lo, hi, colors, bound=10)
        assert (s.p[r], s.q[r], s.p[g], s.q[g], s.p[b], s.q[b]) == (1, 4, 1, 3, 2, 6)
        assert s.u == (1, 1, 2) and s.v == (6, 4, 3)
        assert s.theta_mid == 2.5

    def test_uv_ordering_random(self):
        rng = np.random.default_rng(1)
        for seed in range(100):
            fam = sc.random_family(seed, 6, "overlapping", colored=True, alpha=float(rng.uniform(0.1, 0.6)))
            _, _, s = middle_line(fam, float(rng.uniform(0, 2 * math.pi)))
            assert s.u[0] <= s.u[1] <= s.u[2] and s.v[0] >= s.v[1] >= s.v[2]
            assert sorted(s.u) == sorted(s.p.values()) and sorted(s.v) == sorted(s.q.values())

    def test_missing_color(self):
        fam = Family.uniform([R(0, 0, 1, 1), R(2, 0, 3, 1)], 0.3, colors=["red", "green"])
        with pytest.raises(ValueError):
            middle_line(fam, 0.0)


class TestBalancedHadwiger:
    def test_balanced_example(self):
        x = vec((1, r), (-1, g), (1, g), (-1, b), (1, b), (-1, r))
        assert is_balanced(x) and is_balanced(x, both_orientations=True)

    def test_zero_not_balanced(self):
        assert not is_balanced(vec((0, r), (0, g), (0, b)))

    def test_red_zero_not_balanced(self):
        assert not is_balanced(vec((0, r), (1, g), (-1, b), (-1, g), (1, b)))

    def test_orientation_flag(self):
        x = vec((1, r), (-1, g), (1, g), (-1, b), (1, r), (-1, b))
        # red/blue only in one orientation: red +1, blue -1
        assert is_balanced(x) and not is_balanced(x, both_orientations=True)

    def test_hadwiger_zero(self):
        assert is_hadwiger(vec((0, r), (0, g), (0, b)))

    def test_hadwiger_forbidden(self):
        assert not is_hadwiger(vec((-1, r), (1, g), (-1, b)))
        assert not is_hadwiger(vec((1, r), (0, r), (-1, g), (1, b)))

    def test_hadwiger_monochromatic(self):
        assert is_hadwiger(vec((-1, r), (1, r), (-1, r)))


class TestOrder:
    def test_precedes(self):
        x = vec((0, r), (1, g), (0, b))
        y = vec((-1, r), (1, g), (1, b))
        assert precedes(x, y)

    def test_not_precedes(self):
        assert not precedes(vec((1, r), (0, g)), vec((-1, r), (0, g)))

    def test_reflexive(self):
        x = vec((1, r), (-1, g))
        assert precedes(x, x)

    def test_mismatch(self):
        with pytest.raises(ValueError):
            precedes(vec((1, r)), vec((1, g)))
        with pytest.raises(ValueError):
            precedes(vec((1, r)), vec((1, r), (0, g)))

    def test_partial_order_exhaustive(self):
        for n in range(1, 5):
            cols = tuple(COLORS[i % 3] for i in range(n))
            vs = [SignVector(s, cols) for s in product((-1, 0, 1), repeat=n)]
            rel = {(i, j) for i, x in enumerate(vs) for j, y in enumerate(vs) if precedes(x, y)}
            assert all((i, i) in rel for i in range(len(vs)))
            assert all(i == j for i, j in rel if (j, i) in rel)
            for i, j in rel:
                for k in range(len(vs)):
                    if (j, k) in rel:
                        assert (i, k) in rel

    def test_first_nonzero(self):
        assert first_nonzero(vec((0, r), (-1, g), (1, b))) == (1, -1)
        assert first_nonzero(vec((0, r), (0, g))) is None

    def test_first_nonzero_small_exhaustive(self):
        failures, checked = first_nonzero_failures(
            4, is_balanced, is_hadwiger, lambda s, c: SignVector(tuple(s), tuple(COLORS[k] for k in c)))
        assert checked > 0 and failures == []


class TestDirectionSets:
    def test_common_transversal_direction_unclassified(self):
        fam = colored_stack()
        thetas, first = classify_directions(fam, 8)
        k = int(np.argmin(np.abs(thetas - math.pi / 2)))
        assert first[k] == 0

    def test_counterexample_covered(self):
        fam = sc.build_colorful_counterexample(certify=False)
        thetas, first = classify_directions(fam, 360)
        assert (first != 0).all()
        half = len(thetas) // 2
        assert (first[:half] == -first[half:]).all()

    def test_arcsets(self):
        fam = sc.build_colorful_counterexample(certify=False)
        s1, s2 = s1_s2_direction_sets(fam, 180)
        assert (s1 | s2).is_full
        assert (s1 & s2).measure() < 1e-12

    def test_no_stabbable_class_gives_balanced(self):
        rng = np.random.default_rng(3)
        seen = 0
        for seed in range(60):
            fam = sc.random_family(seed, 6, "overlapping", colored=True, alpha=float(rng.uniform(0.1, 0.45)))
            for th in np.linspace(0, 2 * math.pi, 16, endpoint=False):
                if any(color_class_stabbable(fam, th).values()):
                    continue
                seen += 1
                assert is_balanced(middle_line(fam, float(th))[1])
        assert seen > 0


class TestMonochromatic:
    def test_single_red(self):
        shapes = [R(0, 0, 1, 1), R(5, 0, 6, 1), R(5, 5, 6, 6), R(0, 9, 1, 10), R(9, 9, 10, 10)]
        fam = Family.uniform(shapes, 0.3, colors=["red", "green", "green", "blue", "blue"])
        hit = find_monochromatic_transversal(fam)
        assert hit is not None and hit[0] == Color.RED

    def test_counterexample_none(self):
        fam = sc.build_colorful_counterexample(certify=False)
        assert find_monochromatic_transversal(fam, directions=2048) is None

    def test_stack_some_color(self):
        assert find_monochromatic_transversal(colored_stack()) is not None
