# src/toric_systems.py
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple

from .cohomology import (
    is_left_orthogonal,
    is_pre_left_orthogonal,
    is_strongly_left_orthogonal,
)
from .linalg import as_int_matrix, cokernel, kernel, solve_integer
from .pic_lattice import (
    DivisorClass,
    IntersectionLattice,
    MinimalModelBasis,
    anticanonical_class,
    euler_char,
    intersect,
    project,
)
from .toric_surface import (
    FanError,
    ToricSurface,
    blow_down,
    blow_up,
    c_representative,
    invariant_divisor,
    iter_contraction_sequences,
    lattice_coordinates,
    minimal_model_basis,
    pullback,
    pushforward,
)


class NotAToricSystemError(ValueError):
    pass


class ArityError(ValueError):
    pass


FLAVORS = ("anchored", "abstract")


@dataclass(frozen=True)
class ToricSystem:
    """
    A_1..A_n with A_i.A_{i+1} = 1 cyclically and A_i.A_j = 0 otherwise.
    Anchored systems also satisfy sum A_i = -K.
    """
    classes: Tuple[DivisorClass, ...]
    flavor: str = "anchored"

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(self.classes))
        if self.flavor not in FLAVORS:
            raise ValueError(f"unknown flavor {self.flavor!r}")
        if not self.classes:
            raise ArityError("empty toric system")
        owner = self.classes[0].owner
        if any(A.owner != owner for A in self.classes):
            raise NotAToricSystemError("classes live on different lattices")

    @property
    def owner(self):
        return self.classes[0].owner

    @property
    def n(self) -> int:
        return len(self.classes)

    def __len__(self) -> int:
        return len(self.classes)

    def __getitem__(self, i: int) -> DivisorClass:
        return self.classes[i % self.n]

    def rotate(self, k: int) -> "ToricSystem":
        k %= self.n
        return ToricSystem(self.classes[k:] + self.classes[:k], self.flavor)

    def reversed(self) -> "ToricSystem":
        """A_{n-1}, ..., A_1, A_n."""
        return ToricSystem(self.classes[:-1][::-1] + self.classes[-1:], self.flavor)

    def interval_sum(self, start: int, length: int) -> DivisorClass:
        total = self.classes[start % self.n]
        for k in range(1, length):
            total = total + self.classes[(start + k) % self.n]
        return total

    def total(self) -> DivisorClass:
        return self.interval_sum(0, self.n)


@dataclass(frozen=True)
class ShortToricSystem:
    classes: Tuple[DivisorClass, ...]

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(self.classes))
        r = len(self.classes)
        for i in range(r):
            for j in range(i + 1, r):
                want = 1 if j == i + 1 else 0
                if intersect(self.classes[i], self.classes[j]) != want:
                    raise NotAToricSystemError(f"A_{i + 1}.A_{j + 1} != {want}")


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: Tuple[str, ...]

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class Deaugmentation:
    surface: object          # ToricSurface or IntersectionLattice owner of the smaller system
    system: ToricSystem
    slot: int
    ray: Optional[Tuple[int, int]] = None


def _rank(owner) -> int:
    return owner.n - 2 if isinstance(owner, ToricSurface) else owner.rank


def validate(system: ToricSystem) -> ValidationReport:
    A = system.classes
    n = len(A)
    problems: List[str] = []
    if n != _rank(system.owner) + 2:
        problems.append(f"length {n} != rank + 2 = {_rank(system.owner) + 2}")
    for i in range(n):
        for j in range(i + 1, n):
            adjacent = j == i + 1 or (i == 0 and j == n - 1)
            want = 1 if adjacent else 0
            got = intersect(A[i], A[j])
            if got != want:
                problems.append(f"A_{i + 1}.A_{j + 1} = {got}, expected {want}")
    if system.flavor == "abstract":
        s = sum(intersect(x, x) for x in A)
        if s != 12 - 3 * n:
            problems.append(f"sum A_i^2 = {s}, expected {12 - 3 * n}")
    else:
        if system.total() != anticanonical_class(system.owner):
            problems.append("sum A_i != -K")
    return ValidationReport(not problems, tuple(problems))


def _require_valid(system: ToricSystem) -> None:
    rep = validate(system)
    if not rep:
        raise NotAToricSystemError("; ".join(rep.violations))


def from_exceptional_sequence(E: Sequence[DivisorClass]) -> ToricSystem:
    """
    A_i = E_{i+1} - E_i for i < n, A_n = -K - sum_{i<n} A_i.
    """
    E = list(E)
    if not E:
        raise ArityError("empty sequence")
    owner = E[0].owner
    n = _rank(owner) + 2
    if len(E) != n:
        raise ArityError(f"expected {n} line bundles, got {len(E)}")
    A = [E[i + 1] - E[i] for i in range(n - 1)]
    partial = A[0]
    for x in A[1:]:
        partial = partial + x
    A.append(anticanonical_class(owner) - partial)
    return ToricSystem(tuple(A), "anchored")


# ---------- lattices attached to surfaces ----------

def surface_lattice(X: ToricSurface) -> IntersectionLattice:
    """
    Pic(X) in the basis D_2, ..., D_{n-1}.
    """
    B = lattice_coordinates(X)
    gram = tuple(tuple(intersect(b, c) for c in B) for b in B)
    k = _surface_coords(X, anticanonical_class(X))
    return IntersectionLattice(gram, k, True)


def _surface_coords(X: ToricSurface, D: DivisorClass) -> Tuple[int, ...]:
    # with c_0 = c_1 = 0 the remaining c_i are the coordinates in D_2..D_{n-1}
    return tuple(c_representative(X, D, 0)[2:])


def to_lattice(system: ToricSystem) -> ToricSystem:
    owner = system.owner
    if not isinstance(owner, ToricSurface):
        return system
    L = surface_lattice(owner)
    return ToricSystem(tuple(L.element(_surface_coords(owner, A)) for A in system.classes), system.flavor)


# ---------- Gale duality ----------

def gale_dual(system: ToricSystem) -> ToricSurface:
    """
    Rays are the images of the standard basis of Z^n in the cokernel of
    Pic -> Z^n, D -> (A_i.D)_i, normalized so that l_1 = (1,0), l_2 = (0,1).
    """
    _require_valid(system)
    owner = system.owner
    B = lattice_coordinates(owner) if isinstance(owner, ToricSurface) else owner.basis()
    M = as_int_matrix([[intersect(A, b) for b in B] for A in system.classes])
    rows, torsion = cokernel(M)
    if rows.shape[0] != 2 or any(abs(int(t)) != 1 for t in torsion):
        raise NotAToricSystemError(f"cokernel is not free of rank 2 (free rank {rows.shape[0]}, torsion {list(torsion)})")
    cols = [(int(rows[0, i]), int(rows[1, i])) for i in range(system.n)]
    (p, q), (r, s) = cols[0], cols[1]
    det = p * s - q * r
    if det not in (1, -1):
        raise NotAToricSystemError(f"l_1, l_2 do not form a basis (det {det})")
    # inverse of [[p, r], [q, s]] (columns l_1, l_2)
    inv = ((s * det, -r * det), (-q * det, p * det))
    rays = [(inv[0][0] * x + inv[0][1] * y, inv[1][0] * x + inv[1][1] * y) for x, y in cols]
    try:
        Y = ToricSurface(tuple(rays))
    except FanError as e:
        raise NotAToricSystemError(f"images do not form a smooth complete fan: {e}") from e
    for i, A in enumerate(system.classes):
        if Y.a_sequence[i] != intersect(A, A):
            raise NotAToricSystemError(f"D_{i + 1}^2 = {Y.a_sequence[i]} but A_{i + 1}^2 = {intersect(A, A)}")
    return Y


# ---------- blow-down ----------

def _merged(system: ToricSystem, i: int) -> List[DivisorClass]:
    A = list(system.classes)
    n = len(A)
    out = []
    for j in range(n):
        if j == i:
            continue
        if j == (i - 1) % n or j == (i + 1) % n:
            out.append(A[j] + A[i])
        else:
            out.append(A[j])
    return out


def blow_down_system(system: ToricSystem, i: int) -> ToricSystem:
    """
    Drop A_i (A_i^2 = -1) and add it to both neighbors; the result lives on A_i^perp.
    If A_i is a -1 curve of the owning toric surface, the result lives on the blow-down.
    """
    n = system.n
    i %= n
    Ai = system.classes[i]
    if intersect(Ai, Ai) != -1:
        raise NotAToricSystemError(f"A_{i + 1}^2 = {intersect(Ai, Ai)}, expected -1")
    if n <= 3:
        raise NotAToricSystemError("cannot blow down a system of length 3")
    owner = system.owner
    merged = _merged(system, i)
    if isinstance(owner, ToricSurface):
        for r, a in enumerate(owner.a_sequence):
            if a == -1 and invariant_divisor(owner, r) == Ai:
                Y = blow_down(owner, r)
                return ToricSystem(tuple(pushforward(owner, Y, B, exact=True) for B in merged), system.flavor)
        system = to_lattice(system)
        owner = system.owner
        merged = _merged(system, i)
        Ai = system.classes[i]
    G = as_int_matrix(owner.gram)
    row = as_int_matrix([list(Ai.coords)]) @ G
    K = kernel(row)
    gram = K.T @ G @ K
    k_new = None
    if owner.anticanonical is not None:
        k_new = tuple(int(x) for x in solve_integer(K, (anticanonical_class(owner) + Ai).coords))
    lattice = IntersectionLattice(
        tuple(tuple(int(x) for x in r) for r in gram), k_new, owner.surface_backed
    )
    classes = tuple(lattice.element([int(x) for x in solve_integer(K, B.coords)]) for B in merged)
    return ToricSystem(classes, system.flavor)


# ---------- exceptionality ----------

def _intervals(n: int, cyclic: bool) -> Iterator[Tuple[int, int]]:
    if cyclic:
        for start in range(n):
            for length in range(1, n):
                yield start, length
    else:
        for start in range(n - 1):
            for length in range(1, n - start):
                yield start, length


def _all_intervals(X: ToricSurface, system: ToricSystem, cyclic: bool, predicate) -> bool:
    if system.owner != X:
        raise ValueError("system does not live on this surface")
    _require_valid(system)
    seen = set()
    for start, length in _intervals(system.n, cyclic):
        D = system.interval_sum(start, length)
        if D.coords in seen:
            continue
        seen.add(D.coords)
        if not predicate(X, D):
            return False
    return True


def is_exceptional(X: ToricSurface, system: ToricSystem) -> bool:
    return _all_intervals(X, system, False, is_left_orthogonal)


def is_strongly_exceptional(X: ToricSurface, system: ToricSystem) -> bool:
    return _all_intervals(X, system, False, is_strongly_left_orthogonal)


def is_cyclic_strongly_exceptional(X: ToricSurface, system: ToricSystem) -> bool:
    return _all_intervals(X, system, True, is_strongly_left_orthogonal)


def numeric_cyclic_strong_check(lattice: IntersectionLattice, system: ToricSystem) -> bool:
    """
    Necessary numerical conditions only: Def of a toric system plus
    chi(A_I) >= 0 and chi(-A_I) = 0 for every proper cyclic interval.
    """
    if system.owner != lattice or not validate(system):
        return False
    for start, length in _intervals(system.n, True):
        D = system.interval_sum(start, length)
        if euler_char(-D) != 0 or euler_char(D) < 0:
            return False
    return True


# ---------- normal form ----------

def elementary_move(system: ToricSystem, i: int) -> ToricSystem:
    """
    A_{i-1}, A_i, A_{i+1} -> A_{i-1} + A_i, -A_i, A_{i+1} + A_i (cyclic indices).
    """
    A = list(system.classes)
    n = len(A)
    i %= n
    Ai = A[i]
    A[(i - 1) % n] = A[(i - 1) % n] + Ai
    A[(i + 1) % n] = A[(i + 1) % n] + Ai
    A[i] = -Ai
    return ToricSystem(tuple(A), system.flavor)


def _first_bad(X: ToricSurface, system: ToricSystem, basis: MinimalModelBasis, cyclic: bool) -> Optional[int]:
    limit = system.n if cyclic else system.n - 1
    for l in range(limit):
        A = system.classes[l]
        if project(A, basis, 0).is_zero():
            continue
        if not is_pre_left_orthogonal(X, A, basis, strong=True):
            return l
    return None


def is_normal_form(X: ToricSurface, system: ToricSystem, basis: MinimalModelBasis, cyclic: bool = False) -> bool:
    return _first_bad(X, system, basis, cyclic) is None


def normal_form(X: ToricSurface, system: ToricSystem, basis: MinimalModelBasis, cyclic: bool = False) -> ToricSystem:
    """
    Repeatedly apply the elementary move at the first member whose minimal
    model projection is non-zero and not strongly pre-left-orthogonal.
    """
    check = is_cyclic_strongly_exceptional if cyclic else is_strongly_exceptional
    if not check(X, system):
        raise NotAToricSystemError("normal form needs a (cyclic) strongly exceptional system")
    guard = 4 * system.n * system.n + 16
    for _ in range(guard):
        l = _first_bad(X, system, basis, cyclic)
        if l is None:
            return system
        if euler_char(system.classes[l]) != 0:
            raise RuntimeError(f"chi(A_{l + 1}) != 0, elementary move is not available")
        system = elementary_move(system, l)
    raise RuntimeError("normal form did not stabilize")


# ---------- admissibility and augmentation ----------

def is_admissible(system: ToricSystem, basis: MinimalModelBasis) -> bool:
    """
    No member of the form R_i - sum_{j in S} R_j with R_i >= R_j for some j in S.
    """
    tree = basis.order
    for A in system.classes:
        coeffs = basis.coordinates(A)
        if any(coeffs[:basis.head]):
            continue
        gammas = coeffs[basis.head:]
        plus = [k for k, g in enumerate(gammas) if g == 1]
        minus = [k for k, g in enumerate(gammas) if g == -1]
        if len(plus) != 1 or not minus or any(g not in (-1, 0, 1) for g in gammas):
            continue
        i = plus[0]
        if any(tree.geq(i, j) for j in minus):
            return False
    return True


def augment(system: ToricSystem, slot: int, R: DivisorClass) -> ToricSystem:
    """
    Insert R after position `slot` and subtract it from both neighbors (cyclic).
    """
    A = list(system.classes)
    n = len(A)
    slot %= n
    nxt = (slot + 1) % n
    A[slot] = A[slot] - R
    A[nxt] = A[nxt] - R
    A.insert(slot + 1, R)
    return ToricSystem(tuple(A), system.flavor)


def augment_blowup(X: ToricSurface, system: ToricSystem, cone: int, slot: int) -> Tuple[ToricSurface, ToricSystem]:
    """
    Blow up the cone, pull the system back and augment it by the new exceptional class.
    """
    Y = blow_up(X, cone)
    R = invariant_divisor(Y, cone + 1)
    pulled = ToricSystem(tuple(pullback(X, Y, A) for A in system.classes), system.flavor)
    return Y, augment(pulled, slot, R)


def _direct_deaugmentations(X: ToricSurface, system: ToricSystem, ray=None) -> Iterator[Deaugmentation]:
    n = system.n
    for r, a in enumerate(X.a_sequence):
        if a != -1 or X.n <= 3:
            continue
        if ray is not None and X.rays[r] != tuple(ray):
            continue
        E = invariant_divisor(X, r)
        for i, A in enumerate(system.classes):
            if A == E:
                Y = blow_down(X, r)
                small = blow_down_system(system, i)
                yield Deaugmentation(Y, small, (i - 1) % (n - 1), X.rays[r])


def _normal_form_bases(X: ToricSurface, max_bases: int = 32) -> Iterator[MinimalModelBasis]:
    count = 0
    for stop in (None, 4):
        for seq in iter_contraction_sequences(X, stop_at=stop):
            yield minimal_model_basis(X, seq)
            count += 1
            if count >= max_bases:
                return


def de_augment(X: ToricSurface, system: ToricSystem, ray=None, cyclic: bool = False) -> Optional[Deaugmentation]:
    """
    Find a member equal to a -1 curve D_r of X and remove it. If none exists,
    retry after bringing a strongly exceptional system into normal form.
    """
    for d in _direct_deaugmentations(X, system, ray):
        return d
    check = is_cyclic_strongly_exceptional if cyclic else is_strongly_exceptional
    if not check(X, system):
        return None
    for basis in _normal_form_bases(X):
        try:
            nf = normal_form(X, system, basis, cyclic=cyclic)
        except RuntimeError:
            continue
        for d in _direct_deaugmentations(X, nf, ray):
            return d
    return None


def standard_augmentation_chain(X: ToricSurface, system: ToricSystem) -> Optional[List[Deaugmentation]]:
    """
    Chain of de-augmentations ending at H,H,H on the plane or at an
    exceptional system on a Hirzebruch surface; None if there is none.
    """
    failed = set()

    def rec(Y: ToricSurface, S: ToricSystem, chain: List[Deaugmentation]) -> Optional[List[Deaugmentation]]:
        key = (Y.rays, tuple(A.coords for A in S.classes))
        if key in failed:
            return None
        if Y.n == 3:
            return chain if validate(S) else None
        cands = list(_direct_deaugmentations(Y, S))
        if not cands:
            d = de_augment(Y, S)
            cands = [d] if d is not None else []
        for d in cands:
            found = rec(d.surface, d.system, chain + [d])
            if found is not None:
                return found
        if Y.n == 4 and validate(S) and is_exceptional(Y, S):
            return chain
        failed.add(key)
        return None

    return rec(X, system, [])


def invariant_system(X: ToricSurface) -> ToricSystem:
    """D_1, ..., D_n."""
    return ToricSystem(tuple(invariant_divisor(X, i) for i in range(X.n)), "anchored")


# ---------- Hirzebruch systems ----------

@dataclass(frozen=True)
class HirzebruchClassification:
    kind: Optional[str]     # "i", "ii" or None
    s: Optional[int]
    exceptional: bool
    strong: bool
    cyclic: bool


def hirzebruch_system(X: ToricSurface, basis: MinimalModelBasis, s: int, kind: str = "i") -> ToricSystem:
    """
    Type i: P, sP+Q, P, -(a+s)P+Q. Type ii (a even): C, P+sC, C, P-sC with C = -(a/2)P+Q.
    """
    a = basis.a
    P, Q = basis.elements[0], basis.elements[1]
    if kind == "i":
        classes = (P, s * P + Q, P, -(a + s) * P + Q)
    elif kind == "ii":
        if a % 2:
            raise ValueError(f"type ii needs an even a, got {a}")
        C = (-(a // 2)) * P + Q
        classes = (C, P + s * C, C, P - s * C)
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return ToricSystem(tuple(classes), "anchored")


def expected_hirzebruch_labels(a: int, kind: Optional[str], s: Optional[int]) -> Tuple[bool, bool, bool]:
    """
    (exceptional, strong, cyclic) according to the classification of toric
    systems on Hirzebruch surfaces.
    """
    if kind == "i":
        return True, s >= -1, s >= -1 and a + s <= 1
    if kind == "ii" and a == 0:
        return True, s >= -1, s >= -1 and s <= 1
    if kind == "ii" and a == 2 and s == 0:
        return True, True, True
    return False, False, False


def classify_hirzebruch_system(X: ToricSurface, basis: MinimalModelBasis, system: ToricSystem) -> HirzebruchClassification:
    """
    Recognize the type and parameter of a 4-term system in the order given
    and attach the expected exceptional / strong / cyclic labels.
    """
    if system.n != 4 or basis.model != "hirzebruch" or basis.t != 0:
        raise ArityError("expects a 4-term system on a Hirzebruch surface")
    a = basis.a
    coords = [basis.coordinates(A) for A in system.classes]
    kind, s = None, None
    if coords[0] == coords[2] == (1, 0):
        cand = coords[1][0]
        if hirzebruch_system(X, basis, cand, "i") == system:
            kind, s = "i", cand
    if kind is None and a % 2 == 0 and coords[0] == coords[2] == (-(a // 2), 1):
        cand = coords[1][1]
        if hirzebruch_system(X, basis, cand, "ii") == system:
            kind, s = "ii", cand
    exc, strong, cyc = expected_hirzebruch_labels(a, kind, s)
    return HirzebruchClassification(kind, s, exc, strong, cyc)
