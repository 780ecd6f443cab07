# src/linalg.py
from __future__ import annotations

from typing import Sequence, Tuple

import numpy as np


def as_int_matrix(rows: Sequence[Sequence[int]]) -> np.ndarray:
    """
    Exact integer matrix (object dtype, python ints).
    """
    M = np.array([[int(x) for x in row] for row in rows], dtype=object)
    if M.ndim != 2:
        M = M.reshape(len(rows), -1)
    return M


def exgcd(a: int, b: int) -> np.ndarray:
    """
    2x2 integer matrix M with det 1 such that M @ [a, b] = [gcd(a, b), 0].
    If a divides b, M[0, 1] == 0.
    """
    a_sign = -1 if a < 0 else 1
    b_sign = -1 if b < 0 else 1
    a, b = a * a_sign, b * b_sign

    M = np.array([[b, 0, 1], [a, 1, 0]], dtype=object)
    while M[1, 0] != 0:
        q = M[0, 0] // M[1, 0]
        M[0] -= q * M[1]
        M = M[::-1]

    g = M[0, 0]
    M = M[:, 1:]
    M *= [a_sign, b_sign]
    if g != 0:
        M[1] = [-b_sign * b // g, a_sign * a // g]
    else:
        M = np.eye(2, dtype=object)
    return M


def inv_2x2_det1(M: np.ndarray) -> np.ndarray:
    assert M.shape == (2, 2) and (M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0] == 1)
    return np.array([[M[1, 1], -M[0, 1]], [-M[1, 0], M[0, 0]]], dtype=object)


def normal_form(A: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    Diagonalize an integer matrix with unimodular row and column operations.

    Returns (S, D, T, Sinv, Tinv) with A == S @ D @ T, D diagonal of A's shape,
    S and T of determinant 1. Divisibility of the diagonal is not enforced,
    which is all the kernel/cokernel computations need.
    """
    D = A.copy().astype(object)
    rows, cols = D.shape
    S, T = np.eye(rows, dtype=object), np.eye(cols, dtype=object)
    Sinv, Tinv = S.copy(), T.copy()

    def clear_row(i: int) -> bool:
        if (D[i, i + 1:] == 0).all():
            return False
        for j in range(i + 1, cols):
            M = exgcd(D[i, i], D[i, j]).T
            D[:, [i, j]] = D[:, [i, j]] @ M
            T[[i, j]] = inv_2x2_det1(M) @ T[[i, j]]
            Tinv[:, [i, j]] = Tinv[:, [i, j]] @ M
        return True

    def clear_col(i: int) -> bool:
        if (D[i + 1:, i] == 0).all():
            return False
        for j in range(i + 1, rows):
            M = exgcd(D[i, i], D[j, i])
            D[[i, j]] = M @ D[[i, j]]
            S[:, [i, j]] = S[:, [i, j]] @ inv_2x2_det1(M)
            Sinv[[i, j]] = M @ Sinv[[i, j]]
        return True

    for i in range(min(rows, cols)):
        clear_col(i)
        while clear_row(i) and clear_col(i):
            pass

    assert (S @ D @ T == A).all()
    return S, D, T, Sinv, Tinv


def _diag_padded(D: np.ndarray, length: int) -> np.ndarray:
    d = np.array([D[i, i] for i in range(min(D.shape))], dtype=object)
    pad = np.zeros(max(0, length - len(d)), dtype=object)
    return np.concatenate([d, pad])


def kernel(A: np.ndarray) -> np.ndarray:
    """Columns span the integer null space of A (a saturated sublattice)."""
    S, D, T, Sinv, Tinv = normal_form(A)
    zero = _diag_padded(D, T.shape[0]) == 0
    return Tinv[:, zero]


def cokernel(A: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Rows of the returned matrix span the annihilator of the image of A.
    Also returns the nonzero diagonal entries, i.e. the torsion orders
    (a free cokernel has them all equal to +-1).
    """
    S, D, T, Sinv, Tinv = normal_form(A)
    diag = _diag_padded(D, S.shape[0])
    zero = diag == 0
    return Sinv[zero], diag[~zero]


def solve_integer(A: np.ndarray, b: Sequence[int]) -> np.ndarray:
    """
    Integer solution x of A @ x == b, or ValueError if none exists.
    """
    S, D, T, Sinv, Tinv = normal_form(A)
    y = Sinv @ np.array([int(v) for v in b], dtype=object)
    x = np.zeros(A.shape[1], dtype=object)
    for i in range(A.shape[0]):
        d = D[i, i] if i < min(D.shape) else 0
        if d == 0:
            if y[i] != 0:
                raise ValueError(f"no solution: inconsistent row {i}")
            continue
        if y[i] % d != 0:
            raise ValueError(f"no integer solution: {y[i]} not divisible by {d}")
        x[i] = y[i] // d
    sol = Tinv @ x
    assert (A @ sol == np.array([int(v) for v in b], dtype=object)).all()
    return sol


def det2(u: Sequence[int], v: Sequence[int]) -> int:
    return int(u[0]) * int(v[1]) - int(u[1]) * int(v[0])
