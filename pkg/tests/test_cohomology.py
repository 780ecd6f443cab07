import unittest

from hypothesis import given, settings
from hypothesis import strategies as st

from src.cohomology import (
    DegenerateProjectionError,
    NotApplicableError,
    StraighteningError,
    cohomology,
    cutout_check,
    degree_bound_check,
    h0,
    is_left_orthogonal,
    is_pre_left_orthogonal,
    is_straightened,
    is_strongly_left_orthogonal,
    minus_one_curve,
    stage_divisors,
    straighten,
    tiling_check,
    triangle_counts,
    triangle_points,
)
from src.pic_lattice import DivisorClass, euler_char
from src.tables import STRAIGHTENED
from src.toric_surface import basis_from_underlines, blow_up, from_a_sequence, invariant_divisor, minimal_model_basis


def plane():
    X = from_a_sequence((1, 1, 1))
    return X, invariant_divisor(X, 0)


def one_point_blowup():
    X = blow_up(from_a_sequence((1, 1, 1)), 0)
    return X, minimal_model_basis(X, list(reversed(X.history.steps)))


class TestCohomology(unittest.TestCase):
    def test_plane_line_bundles(self):
        X, H = plane()
        for k, want in ((0, 1), (1, 3), (2, 6), (3, 10)):
            rep = cohomology(X, k * H)
            self.assertEqual((rep.h0, rep.h1, rep.h2), (want, 0, 0))
        for k in (-1, -2):
            rep = cohomology(X, k * H)
            self.assertEqual((rep.h0, rep.h1, rep.h2), (0, 0, 0))
        rep = cohomology(X, -3 * H)
        self.assertEqual((rep.h0, rep.h1, rep.h2), (0, 0, 1))
        self.assertEqual(len(rep.interior), 0)

    def test_hirzebruch_middle_cohomology(self):
        # O(1, -2) on P1 x P1
        X = from_a_sequence((0, 0, 0, 0))
        D = invariant_divisor(X, 0) - 2 * invariant_divisor(X, 1)
        rep = cohomology(X, D)
        self.assertEqual(rep.chi, euler_char(D))
        self.assertEqual(rep.h0 - rep.h1 + rep.h2, rep.chi)
        self.assertEqual(rep.h1, 2)

    def test_report_as_dict(self):
        X, H = plane()
        doc = cohomology(X, H).as_dict()
        self.assertEqual(doc["h0"], 3)
        self.assertEqual(len(doc["sections"]), 3)

    def test_left_orthogonality_on_plane(self):
        X, H = plane()
        self.assertTrue(is_left_orthogonal(X, H))
        self.assertTrue(is_strongly_left_orthogonal(X, H))
        self.assertTrue(is_strongly_left_orthogonal(X, 2 * H))
        self.assertFalse(is_left_orthogonal(X, 3 * H))
        self.assertFalse(is_left_orthogonal(X, X.zero()))

    def test_exceptional_curves_are_strongly_left_orthogonal(self):
        X, b = one_point_blowup()
        H, R1 = b.elements
        self.assertTrue(is_strongly_left_orthogonal(X, R1))
        self.assertTrue(is_strongly_left_orthogonal(X, H - R1))
        self.assertFalse(is_left_orthogonal(X, -R1))

    def test_pre_left_orthogonal(self):
        X, b = one_point_blowup()
        H, R1 = b.elements
        self.assertTrue(is_pre_left_orthogonal(X, H - R1, b, strong=True))
        with self.assertRaises(DegenerateProjectionError):
            is_pre_left_orthogonal(X, R1, b)

    def test_degree_bound(self):
        X, H = plane()
        self.assertTrue(degree_bound_check(X, H))
        self.assertFalse(degree_bound_check(X, -H))

    @settings(max_examples=40, deadline=None, derandomize=True)
    @given(st.integers(min_value=-4, max_value=4), st.integers(min_value=-4, max_value=4))
    def test_euler_characteristic_matches_counts(self, beta, gamma):
        X, b = one_point_blowup()
        D = b.from_coordinates((beta, gamma))
        rep = cohomology(X, D)
        self.assertEqual(rep.h0 - rep.h1 + rep.h2, euler_char(D))
        self.assertGreaterEqual(rep.h1, 0)
        self.assertEqual(len(rep.interior), cohomology(X, -D).h2)


class TestTriangles(unittest.TestCase):
    def test_triangle_counts(self):
        c = triangle_counts(-2)
        self.assertEqual((c.total, c.plus, c.minus), (6, 1, 3))
        c = triangle_counts(0)
        self.assertEqual((c.total, c.plus, c.minus), (1, 0, 0))
        with self.assertRaises(NotApplicableError):
            triangle_counts(1)

    def test_triangle_points_match_counts(self):
        X, b = one_point_blowup()
        D = b.parse("3H-2R1")
        tri = triangle_points(X, D, b, 1)
        c = triangle_counts(-2)
        self.assertEqual((len(tri.total), len(tri.plus), len(tri.minus)), (c.total, c.plus, c.minus))
        with self.assertRaises(NotApplicableError):
            triangle_points(X, b.parse("H+R1"), b, 1)

    def test_stage_divisors(self):
        X, b = one_point_blowup()
        stages = stage_divisors(X, b.parse("2H-R1"), b)
        self.assertEqual(len(stages), 2)
        X0, D0 = stages[0]
        self.assertEqual(X0.n, 3)
        self.assertEqual(D0.coords, (2, 2, 2))

    def test_tiling_agrees_with_cohomology(self):
        X, b = one_point_blowup()
        for expr in ("H-R1", "2H-R1", "H", "2H-2R1"):
            D = b.parse(expr)
            rep = tiling_check(X, D, b)
            self.assertEqual(rep.lo, is_left_orthogonal(X, D), expr)
            self.assertEqual(rep.strong, is_strongly_left_orthogonal(X, D), expr)
        with self.assertRaises(NotApplicableError):
            tiling_check(X, b.parse("H+R1"), b)

    def test_cutout_for_fiber_class(self):
        X, b = one_point_blowup()
        self.assertTrue(cutout_check(X, b.parse("H-R1"), b, 1, strong=True))


class TestStraightening(unittest.TestCase):
    def test_tabulated_divisors_are_straightened(self):
        for row in STRAIGHTENED[:1]:
            X = from_a_sequence(row.a)
            b = basis_from_underlines(X, row.underlined)
            for expr in row.divisors:
                D = b.parse(expr)
                self.assertTrue(is_strongly_left_orthogonal(X, D), expr)
                self.assertTrue(is_straightened(X, D), expr)
                self.assertGreater(h0(X, D), 0)

    def test_straighten_contracts_to_plane(self):
        X, b = one_point_blowup()
        res = straighten(X, b.parse("H-R1"))
        self.assertEqual(res.surface.n, 3)
        self.assertFalse(res.flipped)
        self.assertEqual(res.contracted, ((1, 1),))
        self.assertTrue(is_straightened(res.surface, res.divisor))
        self.assertTrue(is_strongly_left_orthogonal(res.surface, res.divisor))

    def test_straighten_rejects_curves_and_non_slo(self):
        X, b = one_point_blowup()
        with self.assertRaises(StraighteningError):
            straighten(X, b.parse("R1"))
        with self.assertRaises(StraighteningError):
            straighten(X, b.parse("3H"))

    def test_minus_one_curves_are_not_straightened(self):
        F1 = from_a_sequence((0, 1, 0, -1))
        E = invariant_divisor(F1, 3)
        self.assertEqual(minus_one_curve(F1, E), 3)
        self.assertIsNone(minus_one_curve(F1, invariant_divisor(F1, 0)))
        self.assertFalse(is_straightened(F1, E))
        with self.assertRaises(StraighteningError):
            straighten(F1, E)
        X, b = one_point_blowup()
        self.assertFalse(is_straightened(X, b.parse("R1")))
        self.assertFalse(is_straightened(X, b.parse("H")))

    def test_sectionless_divisor_is_flipped_first(self):
        X = from_a_sequence((-1, -1, -1, -1, -1, -1))
        D = DivisorClass((-1, 1, -1, 1, -1, 1), X)
        self.assertEqual(h0(X, D), 0)
        res = straighten(X, D)
        self.assertTrue(res.flipped)
        self.assertEqual(len(res.contracted), 3)
        self.assertEqual(res.surface.n, 3)
        self.assertEqual(res.divisor.coords, (1, 1, 1))

    def test_fiber_sum_returns_to_hirzebruch(self):
        X = blow_up(from_a_sequence((0, 0, 0, 0)), 0)
        b = minimal_model_basis(X, list(reversed(X.history.steps)))
        D = b.parse("P+Q-R1")
        self.assertEqual([D.coords[i] for i in (0, 1, 2)], [0, 1, 0])
        res = straighten(X, D)
        self.assertEqual(res.contracted, (X.rays[1],))
        self.assertEqual(res.surface.n, 4)
        self.assertEqual(h0(res.surface, res.divisor), 4)
        self.assertTrue(is_straightened(res.surface, res.divisor))
        self.assertIsNone(minus_one_curve(res.surface, res.divisor))


if __name__ == "__main__":
    unittest.main()
