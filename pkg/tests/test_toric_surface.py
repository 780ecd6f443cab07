import unittest

from hypothesis import given, settings
from hypothesis import strategies as st

from src.tables import NEF_SURFACES
from src.toric_surface import (
    FanError,
    NotContractibleError,
    PlaneSurfaceError,
    anticanonical_status,
    basis_from_underlines,
    blow_down,
    blow_up,
    c_representative,
    canonical_form,
    check_intersection_table,
    class_from_c,
    contraction_order,
    enumerate_surfaces,
    from_a_sequence,
    from_rays,
    invariant_divisor,
    is_isomorphic,
    iter_contraction_sequences,
    minimal_model_basis,
    partial_order,
    pullback,
    pushforward,
    two_step_blowdown,
)

P2 = (1, 1, 1)
COUNTEREXAMPLE = (-2, -2, -1, -3, -2, 0, 1)


class TestFans(unittest.TestCase):
    def test_plane_rays(self):
        X = from_a_sequence(P2)
        self.assertEqual(X.rays, ((1, 0), (0, 1), (-1, -1)))
        self.assertEqual(X.rank, 1)
        self.assertEqual(anticanonical_status(X), "ample")

    def test_rays_to_a_sequence(self):
        X = from_rays([(1, 0), (0, 1), (-1, 2), (0, -1)])
        self.assertEqual(X.a_sequence, (0, -2, 0, 2))
        self.assertEqual(canonical_form(X.a_sequence), canonical_form((0, 2, 0, -2)))
        self.assertEqual(anticanonical_status(X), "nef")

    def test_canonical_form_is_rotation_and_reflection_invariant(self):
        a = COUNTEREXAMPLE
        self.assertEqual(canonical_form(a[3:] + a[:3]), canonical_form(a))
        self.assertEqual(canonical_form(a[::-1]), canonical_form(a))
        self.assertEqual(canonical_form(a)[0], -3)

    def test_invalid_fans_rejected(self):
        with self.assertRaises(FanError):
            from_rays([(2, 0), (0, 1), (-1, -1)])
        with self.assertRaises(FanError):
            from_rays([(1, 0), (0, 1), (-1, 0)])
        with self.assertRaises(FanError):
            from_a_sequence((1, 1, 2))
        with self.assertRaises(FanError):
            from_a_sequence((0, 0))

    def test_counterexample_is_not_nef(self):
        X = from_a_sequence(COUNTEREXAMPLE)
        self.assertEqual(X.n, 7)
        self.assertEqual(anticanonical_status(X), "not-nef")
        self.assertTrue(check_intersection_table(X))

    def test_blow_up_and_down(self):
        X = from_a_sequence(P2)
        Y = blow_up(X, 0)
        self.assertEqual(Y.rays[1], (1, 1))
        self.assertEqual(Y.a_sequence, (0, -1, 0, 1))
        self.assertEqual(Y.history.steps[0].ray, (1, 1))
        self.assertEqual(blow_down(Y, 1).rays, X.rays)
        with self.assertRaises(NotContractibleError):
            blow_down(Y, 0)
        with self.assertRaises(NotContractibleError):
            blow_down(X, 0)

    def test_invariant_divisors_sum_to_anticanonical(self):
        X = from_a_sequence(COUNTEREXAMPLE)
        total = X.zero()
        for i in range(X.n):
            total = total + invariant_divisor(X, i)
        self.assertEqual(total.coords, X.anticanonical)

    def test_element_checks_relation(self):
        X = from_a_sequence(P2)
        self.assertEqual(X.element((1, 1, 1)).coords, (1, 1, 1))
        with self.assertRaises(ValueError):
            X.element((1, 0, 0))
        with self.assertRaises(ValueError):
            X.element((1, 1))

    @settings(max_examples=40, deadline=None, derandomize=True)
    @given(st.lists(st.integers(min_value=-3, max_value=3), min_size=7, max_size=7))
    def test_c_vector_round_trip(self, c):
        X = from_a_sequence(COUNTEREXAMPLE)
        D = class_from_c(X, c)
        c0 = c_representative(X, D)
        self.assertEqual(c0[0], 0)
        self.assertEqual(c0[1], 0)
        self.assertEqual(class_from_c(X, c0), D)


class TestRefinements(unittest.TestCase):
    def test_pullback_then_pushforward(self):
        X = from_a_sequence(P2)
        Y = blow_up(blow_up(X, 0), 2)
        H = invariant_divisor(X, 0)
        pulled = pullback(X, Y, H)
        self.assertEqual(pushforward(Y, X, pulled, exact=True), H)
        with self.assertRaises(ValueError):
            pushforward(Y, X, invariant_divisor(Y, 1), exact=True)

    def test_contraction_sequences_reach_minimal_models(self):
        X = from_a_sequence(COUNTEREXAMPLE)
        seqs = list(iter_contraction_sequences(X))
        self.assertTrue(seqs)
        for seq in seqs[:5]:
            self.assertIn(X.n - len(seq), (3, 4))

    def test_minimal_model_basis_on_plane_blowup(self):
        X = blow_up(blow_up(from_a_sequence(P2), 0), 0)
        b = minimal_model_basis(X, list(reversed(X.history.steps)))
        self.assertEqual(b.model, "plane")
        self.assertEqual(b.t, 2)
        self.assertEqual(b.labels(), ("H", "R1", "R2"))
        minus_k = b.from_coordinates((3, -1, -1))
        self.assertEqual(minus_k.coords, X.anticanonical)
        tree = partial_order(X)
        self.assertTrue(tree.geq(1, 0))
        self.assertFalse(tree.geq(0, 1))

    def test_basis_from_underlines_names_left_to_right(self):
        X = from_a_sequence((-1, -2, 0, 1, -1))
        self.assertEqual(contraction_order(X, [0, 1]), [0, 1])
        b = basis_from_underlines(X, [0, 1])
        self.assertEqual(b.model, "plane")
        R1 = b.parse("R1")
        self.assertEqual(R1, invariant_divisor(X, 0))
        D = b.parse("2H-R1")
        self.assertEqual(b.parse(b.format(D)), D)
        self.assertEqual(b.parse("3H-R1-R2").coords, X.anticanonical)

    def test_basis_from_underlines_keeps_listed_order(self):
        X = from_a_sequence((-1, -2, 0, -1, -1, -2, -2))
        D4, D5 = invariant_divisor(X, 4), invariant_divisor(X, 5)
        b = basis_from_underlines(X, (0, 1, 5, 4))
        self.assertEqual(b.parse("R4").coords, D4.coords)
        self.assertEqual(b.parse("R3").coords, (D4 + D5).coords)
        b = basis_from_underlines(X, (0, 1, 4, 5))
        self.assertEqual(b.parse("R3").coords, D4.coords)
        with self.assertRaises(ValueError):
            basis_from_underlines(X, (0, 0, 4, 5))

    def test_named_coefficients_follow_labels(self):
        X = from_a_sequence((-1, -2, -1, -2, -1, -2, -1, -2))
        b = basis_from_underlines(X, (0, 2, 4, 5, 7))
        D0 = invariant_divisor(X, 0)
        self.assertEqual(b.from_named((0, 1, 0, 0, 0, 0)).coords, D0.coords)
        self.assertNotEqual(b.from_coordinates((0, 1, 0, 0, 0, 0)).coords, D0.coords)
        self.assertEqual(b.format(D0), "R1")
        D = b.from_named((4, -2, -2, -2, -1, -1))
        self.assertEqual(D, b.parse("4H-2(R1+R2+R3)-R4-R5"))
        self.assertEqual(b.format(D), "4H-2R1-2R2-2R3-R4-R5")

    def test_uncontractible_underlines(self):
        X = from_a_sequence((-1, -2, 0, 1, -1))
        with self.assertRaises(NotContractibleError):
            contraction_order(X, [1, 2])


class TestEnumeration(unittest.TestCase):
    def test_small_counts_match_nef_list(self):
        for n in (3, 4, 5, 6):
            expected = {canonical_form(a) for _, a in NEF_SURFACES if len(a) == n}
            found = {canonical_form(X.a_sequence) for X in enumerate_surfaces(n, -2)}
            self.assertEqual(found, expected, f"n={n}")

    def test_enumeration_is_up_to_isomorphism(self):
        found = enumerate_surfaces(5, -3, 3)
        forms = [canonical_form(X.a_sequence) for X in found]
        self.assertEqual(len(forms), len(set(forms)))
        for X in found:
            self.assertTrue(is_isomorphic(X, from_a_sequence(X.a_sequence)))

    def test_two_step_blowdown(self):
        self.assertEqual(two_step_blowdown(from_a_sequence((0, 2, 0, -2))), (True, ((), ())))
        with self.assertRaises(PlaneSurfaceError):
            two_step_blowdown(from_a_sequence(P2))
        verdict, witness = two_step_blowdown(from_a_sequence((-1, -1, -1, -1, -1, -1)))
        self.assertTrue(verdict)
        self.assertEqual(len(witness[0]) + len(witness[1]), 2)

    def test_counterexample_needs_three_rounds(self):
        self.assertEqual(two_step_blowdown(from_a_sequence(COUNTEREXAMPLE)), (False, None))

    def test_one_more_blowup_contracts_in_two_rounds(self):
        verdict, witness = two_step_blowdown(from_a_sequence((-2, -2, -1, -3, -2, -1, -1, 0)))
        self.assertTrue(verdict)
        self.assertEqual(len(witness[0]) + len(witness[1]), 4)


if __name__ == "__main__":
    unittest.main()
