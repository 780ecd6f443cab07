# src/pic_lattice.py
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .expressions import parse_vector


class LatticeMismatchError(ValueError):
    pass


class UnsupportedLatticeError(ValueError):
    pass


class InvalidReflectionError(ValueError):
    pass


class ShapeMismatchError(ValueError):
    pass


def binom2(x: int) -> int:
    """
    x(x-1)/2 for every integer x, negatives included (binom2(-1) == 1).
    """
    return x * (x - 1) // 2


def inertia(gram: Sequence[Sequence[int]]) -> Tuple[int, int, int]:
    """
    (positive, negative, zero) counts of a symmetric integer form, computed by
    exact congruence diagonalization over the rationals.
    """
    M = [[Fraction(x) for x in row] for row in gram]
    pos = neg = zero = 0
    while M:
        size = len(M)
        pivot = next((i for i in range(size) if M[i][i] != 0), None)
        if pivot is None:
            off = next(((i, j) for i in range(size) for j in range(size) if M[i][j] != 0), None)
            if off is None:
                zero += size
                break
            i, j = off
            # e_i -> e_i + e_j makes the diagonal entry 2*M[i][j]
            for k in range(size):
                M[i][k] += M[j][k]
            for k in range(size):
                M[k][i] += M[k][j]
            continue
        p = M[pivot][pivot]
        if p > 0:
            pos += 1
        else:
            neg += 1
        rest = [k for k in range(size) if k != pivot]
        M = [[M[r][c] - M[r][pivot] * M[pivot][c] / p for c in rest] for r in rest]
    return pos, neg, zero


@dataclass(frozen=True)
class IntersectionLattice:
    """
    Free Z-module with an integral symmetric bilinear form, given by its Gram
    matrix. `anticanonical` holds the coordinates of -K when known.
    """
    gram: Tuple[Tuple[int, ...], ...]
    anticanonical: Optional[Tuple[int, ...]] = None
    surface_backed: bool = False
    labels: Optional[Tuple[str, ...]] = field(default=None, compare=False)

    def __post_init__(self):
        gram = tuple(tuple(int(x) for x in row) for row in self.gram)
        object.__setattr__(self, "gram", gram)
        r = len(gram)
        if any(len(row) != r for row in gram):
            raise ShapeMismatchError(f"gram matrix is not square: {gram}")
        if any(gram[i][j] != gram[j][i] for i in range(r) for j in range(r)):
            raise ShapeMismatchError(f"gram matrix is not symmetric: {gram}")
        if self.anticanonical is not None:
            k = tuple(int(x) for x in self.anticanonical)
            if len(k) != r:
                raise ShapeMismatchError(f"anticanonical has length {len(k)}, rank is {r}")
            object.__setattr__(self, "anticanonical", k)
        if self.labels is not None and len(self.labels) != r:
            raise ShapeMismatchError(f"{len(self.labels)} labels for rank {r}")
        if self.surface_backed:
            pos, neg, zero = inertia(gram)
            if (pos, neg, zero) != (1, r - 1, 0):
                raise UnsupportedLatticeError(
                    f"signature ({pos}, {neg}, {zero}) is not (1, {r - 1}) for a surface lattice"
                )
            if self.anticanonical is not None:
                k2 = self.pair(self.anticanonical, self.anticanonical)
                if k2 != 10 - r:
                    raise UnsupportedLatticeError(f"K^2 = {k2}, expected {10 - r} for rank {r}")

    @property
    def rank(self) -> int:
        return len(self.gram)

    def pair(self, x: Sequence[int], y: Sequence[int]) -> int:
        g = self.gram
        return sum(int(x[i]) * g[i][j] * int(y[j]) for i in range(len(g)) for j in range(len(g)) if g[i][j])

    def element(self, coords: Sequence[int]) -> "DivisorClass":
        return DivisorClass(tuple(int(c) for c in coords), self)

    def basis(self) -> List["DivisorClass"]:
        r = self.rank
        return [self.element([1 if j == i else 0 for j in range(r)]) for i in range(r)]

    def zero(self) -> "DivisorClass":
        return self.element([0] * self.rank)

    @classmethod
    def plane_blowup(cls, t: int) -> "IntersectionLattice":
        """
        Basis H, R_1..R_t with H^2 = 1, R_i^2 = -1, all other products 0.
        """
        r = t + 1
        gram = [[0] * r for _ in range(r)]
        gram[0][0] = 1
        for i in range(1, r):
            gram[i][i] = -1
        k = [3] + [-1] * t
        labels = ("H",) + tuple(f"R{i}" for i in range(1, t + 1))
        return cls(tuple(map(tuple, gram)), tuple(k), True, labels)

    @classmethod
    def hirzebruch_blowup(cls, a: int, t: int) -> "IntersectionLattice":
        """
        Basis P, Q, R_1..R_t with P^2 = 0, Q^2 = a, P.Q = 1.
        """
        r = t + 2
        gram = [[0] * r for _ in range(r)]
        gram[0][1] = gram[1][0] = 1
        gram[1][1] = a
        for i in range(2, r):
            gram[i][i] = -1
        k = [2 - a, 2] + [-1] * t
        labels = ("P", "Q") + tuple(f"R{i}" for i in range(1, t + 1))
        return cls(tuple(map(tuple, gram)), tuple(k), True, labels)


@dataclass(frozen=True)
class DivisorClass:
    """
    Element of a Picard lattice. `owner` is an IntersectionLattice (coords in
    its basis) or a ToricSurface (coords = d-vector).
    """
    coords: Tuple[int, ...]
    owner: Any

    def _check(self, other: "DivisorClass") -> None:
        if not isinstance(other, DivisorClass):
            raise TypeError(f"expected DivisorClass, got {type(other).__name__}")
        if other.owner != self.owner:
            raise LatticeMismatchError("divisor classes live on different lattices")

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        self._check(other)
        return DivisorClass(tuple(x + y for x, y in zip(self.coords, other.coords)), self.owner)

    def __sub__(self, other: "DivisorClass") -> "DivisorClass":
        self._check(other)
        return DivisorClass(tuple(x - y for x, y in zip(self.coords, other.coords)), self.owner)

    def __neg__(self) -> "DivisorClass":
        return DivisorClass(tuple(-x for x in self.coords), self.owner)

    def __mul__(self, k: int) -> "DivisorClass":
        if not isinstance(k, (int, np.integer)):
            return NotImplemented
        return DivisorClass(tuple(int(k) * x for x in self.coords), self.owner)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __repr__(self) -> str:
        return f"DivisorClass({list(self.coords)})"


def zero_class(owner: Any) -> DivisorClass:
    return owner.zero()


def anticanonical_class(owner: Any) -> DivisorClass:
    k = getattr(owner, "anticanonical", None)
    if k is None:
        raise UnsupportedLatticeError("lattice has no anticanonical class")
    return DivisorClass(tuple(k), owner)


def intersect(D: DivisorClass, E: DivisorClass) -> int:
    if D.owner != E.owner:
        raise LatticeMismatchError("cannot intersect classes from distinct lattices")
    return int(D.owner.pair(D.coords, E.coords))


def euler_char(D: DivisorClass) -> int:
    """
    Riemann-Roch: chi(D) = 1 + (D^2 - K.D) / 2.
    """
    minus_k = anticanonical_class(D.owner)
    twice = intersect(D, D) + intersect(minus_k, D)
    if twice % 2:
        raise UnsupportedLatticeError(f"D^2 - K.D = {twice} is odd; form is not a surface form")
    return 1 + twice // 2


def is_numerically_left_orthogonal(D: DivisorClass) -> bool:
    return euler_char(-D) == 0


def reflect(E: DivisorClass, s: int, D: DivisorClass) -> DivisorClass:
    """
    r_E(D) = s (E.D) E + D, defined when E^2 * s == -2.
    """
    if intersect(E, E) * s != -2:
        raise InvalidReflectionError(f"E^2 = {intersect(E, E)} and s = {s} do not satisfy E^2 * s = -2")
    return D + (s * intersect(E, D)) * E


def in_root_set(D: DivisorClass, i: int) -> bool:
    minus_k = anticanonical_class(D.owner)
    if euler_char(-D) != 0 or intersect(minus_k, D) != i:
        return False
    assert intersect(D, D) == i - 2
    return True


@dataclass(frozen=True)
class MinimalModelBasis:
    """
    Minimal-model coordinates on a Picard lattice.

    model is "plane" (elements H, R_1..R_t) or "hirzebruch" (elements P, Q,
    R_1..R_t with P^2 = 0, Q^2 = a, P.Q = 1). R_k is the total transform of
    the k-th exceptional curve of `blowdown_sequence` read from X_0 upwards.
    """
    model: str
    a: int
    elements: Tuple[DivisorClass, ...]
    order: Any = field(default=None, compare=False)
    blowdown_sequence: Tuple[Any, ...] = field(default=(), compare=False)
    names: Optional[Tuple[str, ...]] = field(default=None, compare=False)

    def __post_init__(self):
        if self.model not in ("plane", "hirzebruch"):
            raise ValueError(f"unknown minimal model: {self.model}")
        head = self.head
        if len(self.elements) < head:
            raise ShapeMismatchError(f"{self.model} basis needs at least {head} elements")
        expected = self._expected_gram()
        got = [[intersect(x, y) for y in self.elements] for x in self.elements]
        if got != expected:
            raise ShapeMismatchError(f"basis products {got} differ from {expected}")

    @property
    def head(self) -> int:
        return 1 if self.model == "plane" else 2

    @property
    def t(self) -> int:
        return len(self.elements) - self.head

    @property
    def owner(self) -> Any:
        return self.elements[0].owner

    @property
    def exceptional(self) -> Tuple[DivisorClass, ...]:
        return self.elements[self.head:]

    def _expected_gram(self) -> List[List[int]]:
        r = len(self.elements)
        gram = [[0] * r for _ in range(r)]
        if self.model == "plane":
            gram[0][0] = 1
        else:
            gram[0][1] = gram[1][0] = 1
            gram[1][1] = self.a
        for i in range(self.head, r):
            gram[i][i] = -1
        return gram

    def coordinates(self, D: DivisorClass) -> Tuple[int, ...]:
        """
        (beta, gamma_1..gamma_t) for the plane, (alpha, beta, gamma_1..gamma_t)
        for Hirzebruch surfaces, D = alpha P + beta Q + sum gamma_i R_i.
        """
        p = [intersect(D, e) for e in self.elements]
        gammas = tuple(-x for x in p[self.head:])
        if self.model == "plane":
            coeffs = (p[0],) + gammas
        else:
            beta = p[0]
            alpha = p[1] - self.a * beta
            coeffs = (alpha, beta) + gammas
        if self.from_coordinates(coeffs) != D:
            raise ShapeMismatchError("class is not in the span of the minimal-model basis")
        return coeffs

    def from_coordinates(self, coeffs: Sequence[int]) -> DivisorClass:
        if len(coeffs) != len(self.elements):
            raise ShapeMismatchError(f"expected {len(self.elements)} coefficients, got {len(coeffs)}")
        total = zero_class(self.owner)
        for c, e in zip(coeffs, self.elements):
            if c:
                total = total + int(c) * e
        return total

    def labels(self) -> Tuple[str, ...]:
        if self.names is not None:
            return tuple(self.names)
        return self._numbered_labels()

    def _numbered_labels(self) -> Tuple[str, ...]:
        head = ("H",) if self.model == "plane" else ("P", "Q")
        return head + tuple(f"R{i}" for i in range(1, self.t + 1))

    def _label_order(self) -> List[int]:
        # element positions listed as H (or P, Q), R1, R2, ...; identity for custom names
        labels = self.labels()
        numbered = self._numbered_labels()
        if sorted(labels) != sorted(numbered):
            return list(range(len(labels)))
        where = {name: k for k, name in enumerate(labels)}
        return [where[name] for name in numbered]

    def from_named(self, coeffs: Sequence[int]) -> DivisorClass:
        """
        Class with coefficients given in label order (H, R1, R2, ... or
        P, Q, R1, ...), whatever order the blow-ups happened in.
        """
        if len(coeffs) != len(self.elements):
            raise ShapeMismatchError(f"expected {len(self.elements)} coefficients, got {len(coeffs)}")
        ordered = [0] * len(coeffs)
        for c, k in zip(coeffs, self._label_order()):
            ordered[k] = int(c)
        return self.from_coordinates(ordered)

    def parse(self, expr: str) -> DivisorClass:
        """
        Class of an expression such as 4H-2(R1+R2+R3)-R4 in this basis.
        """
        return self.from_coordinates(parse_vector(expr, self.labels()))

    def format(self, D: DivisorClass) -> str:
        """
        Human-readable form such as 3H-2R1-R2 (0 for the zero class).
        """
        parts: List[str] = []
        coeffs, labels = self.coordinates(D), self.labels()
        for k in self._label_order():
            c, name = coeffs[k], labels[k]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = "" if abs(c) == 1 else str(abs(c))
            parts.append(f"{sign}{mag}{name}")
        if not parts:
            return "0"
        text = "".join(parts)
        return text[1:] if text.startswith("+") else text


def euler_char_closed_form(coeffs: Sequence[int], basis: MinimalModelBasis, sign: int = 1) -> int:
    """
    Closed Euler characteristic formulas in minimal-model coordinates.

    sign=+1 gives chi(D), sign=-1 gives chi(-D), both in terms of D's coefficients.
    """
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    if len(coeffs) != len(basis.elements):
        raise ShapeMismatchError(f"expected {len(basis.elements)} coefficients, got {len(coeffs)}")
    if basis.model == "plane":
        beta, gammas = coeffs[0], coeffs[1:]
        if sign == 1:
            return binom2(beta + 2) - sum(binom2(g) for g in gammas)
        return binom2(beta - 1) - sum(binom2(g + 1) for g in gammas)
    alpha, beta, gammas = coeffs[0], coeffs[1], coeffs[2:]
    a = basis.a
    if sign == 1:
        return (alpha + 1) * (beta + 1) + a * binom2(beta + 1) - sum(binom2(g) for g in gammas)
    return (1 - alpha) * (1 - beta) + a * binom2(beta) - sum(binom2(g + 1) for g in gammas)


def project(D: DivisorClass, basis: MinimalModelBasis, i: int) -> DivisorClass:
    """
    (D)_i: forget the coefficients of R_{i+1}..R_t.
    """
    if not 0 <= i <= basis.t:
        raise ValueError(f"projection level {i} outside [0, {basis.t}]")
    coeffs = list(basis.coordinates(D))
    for k in range(basis.head + i, len(coeffs)):
        coeffs[k] = 0
    return basis.from_coordinates(coeffs)


def lattice_basis(lattice: IntersectionLattice) -> MinimalModelBasis:
    """
    Minimal-model basis of a lattice built by plane_blowup / hirzebruch_blowup.
    """
    elems = tuple(lattice.basis())
    labels = lattice.labels or ()
    if labels[:1] == ("H",):
        return MinimalModelBasis("plane", 0, elems)
    if labels[:2] == ("P", "Q"):
        return MinimalModelBasis("hirzebruch", lattice.gram[1][1], elems)
    raise UnsupportedLatticeError("lattice carries no minimal-model labels")
