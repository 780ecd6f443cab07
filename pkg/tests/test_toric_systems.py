import unittest

from src.pic_lattice import IntersectionLattice, lattice_basis
from src.toric_surface import blow_up, canonical_form, from_a_sequence, invariant_divisor, minimal_model_basis
from src.toric_systems import (
    ArityError,
    NotAToricSystemError,
    ToricSystem,
    augment,
    augment_blowup,
    blow_down_system,
    classify_hirzebruch_system,
    de_augment,
    from_exceptional_sequence,
    gale_dual,
    hirzebruch_system,
    invariant_system,
    is_admissible,
    is_cyclic_strongly_exceptional,
    is_exceptional,
    is_normal_form,
    is_strongly_exceptional,
    normal_form,
    numeric_cyclic_strong_check,
    standard_augmentation_chain,
    to_lattice,
    validate,
)


def plane_system():
    X = from_a_sequence((1, 1, 1))
    H = invariant_divisor(X, 0)
    return X, ToricSystem((H, H, H))


class TestValidation(unittest.TestCase):
    def test_plane_system(self):
        X, S = plane_system()
        self.assertTrue(validate(S))
        self.assertTrue(is_cyclic_strongly_exceptional(X, S))

    def test_violations_are_reported(self):
        X, S = plane_system()
        H = S.classes[0]
        bad = ToricSystem((H, H, 2 * H))
        rep = validate(bad)
        self.assertFalse(rep.ok)
        self.assertTrue(any("-K" in v for v in rep.violations))
        with self.assertRaises(NotAToricSystemError):
            is_exceptional(X, bad)

    def test_rotation_and_reversal(self):
        X = from_a_sequence((-2, -2, -1, -3, -2, 0, 1))
        S = invariant_system(X)
        self.assertTrue(validate(S.rotate(3)))
        self.assertTrue(validate(S.reversed()))
        self.assertEqual(S.total().coords, X.anticanonical)

    def test_from_exceptional_sequence(self):
        X, S = plane_system()
        H = S.classes[0]
        self.assertEqual(from_exceptional_sequence([X.zero(), H, 2 * H]), S)
        with self.assertRaises(ArityError):
            from_exceptional_sequence([X.zero(), H])

    def test_abstract_system_on_lattice(self):
        L = IntersectionLattice.plane_blowup(0)
        H = L.element((1,))
        S = ToricSystem((H, H, H), "abstract")
        self.assertTrue(validate(S))
        self.assertTrue(numeric_cyclic_strong_check(L, S))


class TestGaleDuality(unittest.TestCase):
    def test_round_trip_on_invariant_systems(self):
        for a in ((1, 1, 1), (0, 2, 0, -2), (-1, -2, 0, 1, -1), (-2, -2, -1, -3, -2, 0, 1)):
            X = from_a_sequence(a)
            Y = gale_dual(invariant_system(X))
            self.assertEqual(canonical_form(Y.a_sequence), canonical_form(a))

    def test_round_trip_through_lattice(self):
        X = from_a_sequence((0, 0, -1, -1, -1))
        Y = gale_dual(to_lattice(invariant_system(X)))
        self.assertEqual(canonical_form(Y.a_sequence), canonical_form(X.a_sequence))

    def test_plane_system_gives_plane(self):
        _, S = plane_system()
        self.assertEqual(gale_dual(S).a_sequence, (1, 1, 1))


class TestHirzebruchSystems(unittest.TestCase):
    def test_labels_match_cohomology(self):
        for a in (0, 1, 2):
            X = from_a_sequence((0, a, 0, -a))
            b = minimal_model_basis(X, [])
            kinds = ("i", "ii") if a % 2 == 0 else ("i",)
            for kind in kinds:
                for s in range(-2, 3):
                    S = hirzebruch_system(X, b, s, kind)
                    cl = classify_hirzebruch_system(X, b, S)
                    self.assertEqual((cl.kind, cl.s), (kind, s))
                    got = (
                        is_exceptional(X, S),
                        is_strongly_exceptional(X, S),
                        is_cyclic_strongly_exceptional(X, S),
                    )
                    self.assertEqual(got, (cl.exceptional, cl.strong, cl.cyclic), f"F{a} {kind} s={s}")

    def test_type_ii_needs_even_a(self):
        X = from_a_sequence((0, 1, 0, -1))
        b = minimal_model_basis(X, [])
        with self.assertRaises(ValueError):
            hirzebruch_system(X, b, 0, "ii")


class TestAugmentation(unittest.TestCase):
    def test_augment_blowup_then_de_augment(self):
        X, S = plane_system()
        Y, T = augment_blowup(X, S, 1, 1)
        self.assertEqual(Y.n, 4)
        self.assertTrue(validate(T))
        self.assertTrue(is_strongly_exceptional(Y, T))
        d = de_augment(Y, T)
        self.assertIsNotNone(d)
        self.assertEqual(d.slot, 1)
        self.assertEqual(d.ray, (-1, 0))
        self.assertEqual(d.surface.rays, X.rays)
        self.assertEqual([A.coords for A in d.system.classes], [A.coords for A in S.classes])

    def test_blow_down_system_on_lattice(self):
        L = IntersectionLattice.plane_blowup(1)
        H, R1 = L.basis()
        S = augment(ToricSystem((H, H, H)), 0, R1)
        self.assertEqual([A.coords for A in S.classes], [(1, -1), (0, 1), (1, -1), (1, 0)])
        small = blow_down_system(S, 1)
        self.assertEqual(small.n, 3)
        self.assertTrue(validate(small))

    def test_admissibility_follows_partial_order(self):
        # R2 is blown up on the exceptional curve of R1, so R2 >= R1
        Y = blow_up(blow_up(from_a_sequence((1, 1, 1)), 0), 0)
        b = minimal_model_basis(Y, list(reversed(Y.history.steps)))
        H, R1, R2 = b.elements
        base = ToricSystem((H, H, H))
        good = augment(augment(base, 0, R1), 1, R2)
        bad = augment(augment(base, 0, R2), 1, R1)
        self.assertEqual(b.format(good.classes[1]), "R1-R2")
        self.assertEqual(b.format(bad.classes[1]), "-R1+R2")
        self.assertTrue(is_admissible(good, b))
        self.assertFalse(is_admissible(bad, b))
        self.assertTrue(is_exceptional(Y, good))
        self.assertFalse(is_exceptional(Y, bad))

    def test_chain_reaches_plane(self):
        X, S = plane_system()
        Y, T = augment_blowup(X, S, 0, 0)
        Z, U = augment_blowup(Y, T, 2, 3)
        chain = standard_augmentation_chain(Z, U)
        self.assertIsNotNone(chain)
        self.assertEqual(chain[-1].surface.n, 3)


class TestNormalForm(unittest.TestCase):
    def test_standard_augmentation_is_in_normal_form(self):
        X, S = plane_system()
        Y, T = augment_blowup(X, S, 0, 0)
        b = minimal_model_basis(Y, list(reversed(Y.history.steps)))
        self.assertTrue(is_normal_form(Y, T, b))
        self.assertEqual(normal_form(Y, T, b), T)

    def test_normal_form_requires_strong_system(self):
        X = from_a_sequence((0, 0, 0, 0))
        b = minimal_model_basis(X, [])
        S = hirzebruch_system(X, b, -3, "i")
        with self.assertRaises(NotAToricSystemError):
            normal_form(X, S, b)


if __name__ == "__main__":
    unittest.main()
