import unittest

from hypothesis import given, settings
from hypothesis import strategies as st

from src.pic_lattice import (
    IntersectionLattice,
    InvalidReflectionError,
    LatticeMismatchError,
    ShapeMismatchError,
    UnsupportedLatticeError,
    anticanonical_class,
    binom2,
    euler_char,
    euler_char_closed_form,
    in_root_set,
    intersect,
    lattice_basis,
    project,
    reflect,
)

coeff = st.integers(min_value=-5, max_value=5)


class TestIntersectionLattice(unittest.TestCase):
    def test_binom2_negative_arguments(self):
        self.assertEqual(binom2(-1), 1)
        self.assertEqual(binom2(0), 0)
        self.assertEqual(binom2(1), 0)
        self.assertEqual(binom2(4), 6)

    def test_plane_blowup_canonical_square(self):
        for t in range(0, 6):
            L = IntersectionLattice.plane_blowup(t)
            minus_k = anticanonical_class(L)
            self.assertEqual(intersect(minus_k, minus_k), 9 - t)

    def test_hirzebruch_blowup_canonical_square(self):
        for a in range(0, 4):
            L = IntersectionLattice.hirzebruch_blowup(a, 2)
            minus_k = anticanonical_class(L)
            self.assertEqual(intersect(minus_k, minus_k), 6)

    def test_non_symmetric_gram_rejected(self):
        with self.assertRaises(ShapeMismatchError):
            IntersectionLattice(((1, 0), (1, -1)))

    def test_wrong_signature_rejected(self):
        with self.assertRaises(UnsupportedLatticeError):
            IntersectionLattice(((1, 0), (0, 1)), None, True)

    def test_wrong_canonical_square_rejected(self):
        with self.assertRaises(UnsupportedLatticeError):
            IntersectionLattice(((1,),), (2,), True)

    def test_mixed_lattices_do_not_intersect(self):
        L1 = IntersectionLattice.plane_blowup(1)
        L2 = IntersectionLattice.plane_blowup(2)
        with self.assertRaises(LatticeMismatchError):
            intersect(L1.element((1, 0)), L2.element((1, 0, 0)))

    def test_euler_characteristic_small_values(self):
        L = IntersectionLattice.plane_blowup(1)
        H, R1 = L.basis()
        self.assertEqual(euler_char(L.zero()), 1)
        self.assertEqual(euler_char(H), 3)
        self.assertEqual(euler_char(-H), 0)
        self.assertEqual(euler_char(-R1), 0)
        self.assertEqual(euler_char(H - R1), 2)

    def test_root_set_membership(self):
        L = IntersectionLattice.plane_blowup(2)
        H, R1, R2 = L.basis()
        self.assertTrue(in_root_set(R1, 1))
        self.assertTrue(in_root_set(R1 - R2, 0))
        self.assertTrue(in_root_set(H, 3))
        self.assertFalse(in_root_set(H, 2))

    def test_reflection_in_minus_two_class(self):
        L = IntersectionLattice.plane_blowup(2)
        H, R1, R2 = L.basis()
        E = R1 - R2
        self.assertEqual(reflect(E, 1, R1), R2)
        with self.assertRaises(InvalidReflectionError):
            reflect(R1, 1, H)


class TestMinimalModelBasis(unittest.TestCase):
    def test_parse_and_format(self):
        b = lattice_basis(IntersectionLattice.plane_blowup(3))
        D = b.parse("4H-2(R1+R2)-R3")
        self.assertEqual(D.coords, (4, -2, -2, -1))
        self.assertEqual(b.format(D), "4H-2R1-2R2-R3")
        self.assertEqual(b.format(b.parse("0")), "0")

    def test_hirzebruch_coordinates(self):
        b = lattice_basis(IntersectionLattice.hirzebruch_blowup(2, 1))
        D = b.parse("-P+Q-R1")
        self.assertEqual(b.coordinates(D), (-1, 1, -1))
        self.assertEqual(b.format(D), "-P+Q-R1")

    def test_projection_forgets_later_exceptionals(self):
        b = lattice_basis(IntersectionLattice.plane_blowup(3))
        D = b.parse("3H-R1-R2-R3")
        self.assertEqual(b.format(project(D, b, 1)), "3H-R1")
        self.assertEqual(project(D, b, 3), D)
        with self.assertRaises(ValueError):
            project(D, b, 4)

    @settings(max_examples=80, deadline=None, derandomize=True)
    @given(st.lists(coeff, min_size=1, max_size=5), st.sampled_from([1, -1]))
    def test_plane_closed_form_matches_riemann_roch(self, coeffs, sign):
        b = lattice_basis(IntersectionLattice.plane_blowup(len(coeffs) - 1))
        D = b.from_coordinates(coeffs)
        want = euler_char(D if sign == 1 else -D)
        self.assertEqual(euler_char_closed_form(coeffs, b, sign), want)

    @settings(max_examples=80, deadline=None, derandomize=True)
    @given(st.integers(min_value=0, max_value=4), st.lists(coeff, min_size=2, max_size=5), st.sampled_from([1, -1]))
    def test_hirzebruch_closed_form_matches_riemann_roch(self, a, coeffs, sign):
        b = lattice_basis(IntersectionLattice.hirzebruch_blowup(a, len(coeffs) - 2))
        D = b.from_coordinates(coeffs)
        want = euler_char(D if sign == 1 else -D)
        self.assertEqual(euler_char_closed_form(coeffs, b, sign), want)


if __name__ == "__main__":
    unittest.main()
