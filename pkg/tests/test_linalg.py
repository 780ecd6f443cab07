import unittest

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from src.linalg import as_int_matrix, cokernel, det2, exgcd, kernel, normal_form, solve_integer

small_ints = st.integers(min_value=-6, max_value=6)
matrices = st.integers(min_value=1, max_value=4).flatmap(
    lambda r: st.integers(min_value=1, max_value=4).flatmap(
        lambda c: st.lists(st.lists(small_ints, min_size=c, max_size=c), min_size=r, max_size=r)
    )
)


class TestLinalg(unittest.TestCase):
    def test_exgcd_reduces_pair(self):
        M = exgcd(12, -18)
        g, z = M @ np.array([12, -18], dtype=object)
        self.assertEqual(abs(g), 6)
        self.assertEqual(z, 0)
        self.assertEqual(M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0], 1)

    def test_kernel_of_ray_matrix(self):
        # rays of P^2 as columns: kernel spanned by (1, 1, 1)
        A = as_int_matrix([[1, 0, -1], [0, 1, -1]])
        K = kernel(A)
        self.assertEqual(K.shape, (3, 1))
        v = [int(x) for x in K[:, 0]]
        self.assertIn(v, ([1, 1, 1], [-1, -1, -1]))

    def test_cokernel_is_free_for_unimodular_image(self):
        A = as_int_matrix([[1], [1], [1]])
        rows, torsion = cokernel(A)
        self.assertEqual(rows.shape[0], 2)
        self.assertTrue(all(abs(int(t)) == 1 for t in torsion))
        self.assertTrue((rows @ A == 0).all())

    def test_cokernel_reports_torsion(self):
        rows, torsion = cokernel(as_int_matrix([[2], [0]]))
        self.assertEqual(rows.shape[0], 1)
        self.assertEqual([abs(int(t)) for t in torsion], [2])

    def test_solve_integer(self):
        A = as_int_matrix([[2, 1], [1, 1]])
        x = solve_integer(A, [3, 2])
        self.assertEqual([int(v) for v in x], [1, 1])

    def test_solve_integer_rejects_non_integral(self):
        with self.assertRaises(ValueError):
            solve_integer(as_int_matrix([[2]]), [1])

    def test_det2(self):
        self.assertEqual(det2((1, 0), (0, 1)), 1)
        self.assertEqual(det2((0, 1), (1, 0)), -1)

    @settings(max_examples=60, deadline=None, derandomize=True)
    @given(matrices)
    def test_normal_form_factorization(self, rows):
        A = as_int_matrix(rows)
        S, D, T, Sinv, Tinv = normal_form(A)
        self.assertTrue((S @ D @ T == A).all())
        self.assertTrue((S @ Sinv == np.eye(S.shape[0], dtype=object)).all())
        self.assertTrue((T @ Tinv == np.eye(T.shape[0], dtype=object)).all())
        off = [D[i, j] for i in range(D.shape[0]) for j in range(D.shape[1]) if i != j]
        self.assertTrue(all(x == 0 for x in off))

    @settings(max_examples=60, deadline=None, derandomize=True)
    @given(matrices)
    def test_kernel_columns_are_annihilated(self, rows):
        A = as_int_matrix(rows)
        K = kernel(A)
        if K.shape[1]:
            self.assertTrue((A @ K == 0).all())


if __name__ == "__main__":
    unittest.main()
