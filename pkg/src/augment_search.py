# src/augment_search.py
from __future__ import annotations

import itertools
import json
import os
import random
import time
from dataclasses import dataclass, field
from multiprocessing import Pool
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import pandas as pd
from tqdm import tqdm

from .cohomology import (
    cohomology,
    degree_bound_check,
    h0,
    is_left_orthogonal,
    is_straightened,
    is_strongly_left_orthogonal,
)
from .linalg import det2
from .pic_lattice import (
    DivisorClass,
    IntersectionLattice,
    MinimalModelBasis,
    anticanonical_class,
    euler_char,
    intersect,
)
from .tables import (
    CYCLIC_SYSTEMS,
    DEL_PEZZO_SYSTEMS,
    NEF_SURFACES,
    SLO_TABLES,
    STRAIGHTENED,
    SystemRow,
    hirzebruch_straightened,
    straightened_row,
)
from .toric_surface import (
    PlaneSurfaceError,
    ToricSurface,
    basis_from_underlines,
    blow_up,
    canonical_form,
    enumerate_surfaces,
    from_a_sequence,
    from_rays,
    invariant_divisor,
    minimal_model_basis,
    two_step_blowdown,
)
from .toric_systems import (
    ToricSystem,
    augment,
    classify_hirzebruch_system,
    expected_hirzebruch_labels,
    gale_dual,
    hirzebruch_system,
    is_admissible,
    is_cyclic_strongly_exceptional,
    is_exceptional,
    is_strongly_exceptional,
    validate,
)

DVector = Tuple[int, ...]
SystemKey = Tuple[DVector, ...]


class TwoRoundError(ValueError):
    pass


class UnsupportedSurfaceError(ValueError):
    pass


# ---------- bounds and d-vector boxes ----------

@dataclass(frozen=True)
class SearchBounds:
    """
    Box for candidate d-vectors: d_floor <= d_i <= ceiling_i + slack.
    Without an explicit d_ceiling the ceiling of ray i is a_i + 3.

    s_range only records which standard-system parameters a box from
    hirzebruch_bounds was sized for; the enumeration reads the box alone.
    """
    d_floor: int = -1
    d_ceiling: Optional[Tuple[int, ...]] = None
    slack: int = 0
    s_range: Tuple[int, int] = (-1, 5)

    def __post_init__(self):
        if self.slack < 0:
            raise ValueError(f"slack must be non-negative, got {self.slack}")
        lo, hi = (int(x) for x in self.s_range)
        if lo > hi:
            raise ValueError(f"empty s_range ({lo}, {hi})")
        object.__setattr__(self, "s_range", (lo, hi))
        if self.d_ceiling is not None:
            ceil = tuple(int(c) for c in self.d_ceiling)
            object.__setattr__(self, "d_ceiling", ceil)
            if any(c + self.slack < self.d_floor for c in ceil):
                raise ValueError(f"ceiling {list(ceil)} + {self.slack} lies below the floor {self.d_floor}")

    def ceilings(self, X: ToricSurface) -> Tuple[int, ...]:
        if self.d_ceiling is None:
            return tuple(max(a + 3 + self.slack, self.d_floor) for a in X.a_sequence)
        if len(self.d_ceiling) != X.n:
            raise ValueError(f"{len(self.d_ceiling)} ceilings for a surface with {X.n} rays")
        return tuple(c + self.slack for c in self.d_ceiling)

    def as_dict(self) -> dict:
        return {
            "d_floor": self.d_floor,
            "d_ceiling": None if self.d_ceiling is None else list(self.d_ceiling),
            "slack": self.slack,
            "s_range": list(self.s_range),
        }


def hirzebruch_bounds(X: ToricSurface, basis: MinimalModelBasis, s_range: Tuple[int, int] = (-1, 5)) -> SearchBounds:
    """
    Smallest box holding the first three members of every standard system
    with parameter in s_range.
    """
    if basis.model != "hirzebruch" or basis.t != 0:
        raise UnsupportedSurfaceError("expects the minimal-model basis of a Hirzebruch surface")
    P, Q = basis.elements
    members = [P]
    for s in range(s_range[0], s_range[1] + 1):
        members.append(s * P + Q)
        if basis.a % 2 == 0:
            C = (-(basis.a // 2)) * P + Q
            members += [C, P + s * C]
    ceil = tuple(max(D.coords[i] for D in members) for i in range(X.n))
    return SearchBounds(d_ceiling=ceil, s_range=s_range)


def enumerate_d_vectors(
    X: ToricSurface,
    ceilings: Sequence[int],
    floor: int = -1,
    total: Optional[Tuple[int, int]] = None,
    progress: bool = False,
) -> Iterator[DVector]:
    """
    d-vectors of classes on X with floor <= d_i <= ceilings[i], every proper
    cyclic interval sum >= -1 and, optionally, sum d_i inside `total`.

    d_0 .. d_{n-3} are branched on; the last two entries are determined by
    sum d_i l_i = 0 since det(l_{n-2}, l_{n-1}) = 1.
    """
    n = X.n
    rays = X.rays
    lp, lq = rays[n - 2], rays[n - 1]
    free = n - 2
    ceilings = [int(c) for c in ceilings]
    if len(ceilings) != n:
        raise ValueError(f"{len(ceilings)} ceilings for a surface with {n} rays")
    # most each suffix of entries can still add
    room = [0] * (n + 1)
    for k in range(n - 1, -1, -1):
        room[k] = room[k + 1] + ceilings[k]
    d = [0] * n

    def rec(k: int, sx: int, sy: int, s: int) -> Iterator[DVector]:
        if k == free:
            v = (-sx, -sy)
            d[n - 2] = det2(v, lq)
            d[n - 1] = det2(lp, v)
            for i in (n - 2, n - 1):
                if not floor <= d[i] <= ceilings[i]:
                    return
            if total is not None and not total[0] <= s + d[n - 2] + d[n - 1] <= total[1]:
                return
            out = tuple(d)
            if degree_bound_check(X, DivisorClass(out, X)):
                yield out
            return
        for v in range(floor, ceilings[k] + 1):
            if total is not None:
                if s + v + floor * (n - 1 - k) > total[1]:
                    break
                if s + v + room[k + 1] < total[0]:
                    continue
            run, ok = 0, True
            d[k] = v
            for j in range(k, -1, -1):
                run += d[j]
                if run < -1:
                    ok = False
                    break
            if not ok:
                continue
            l = rays[k]
            yield from rec(k + 1, sx + v * l[0], sy + v * l[1], s + v)

    firsts = range(floor, ceilings[0] + 1)
    for v in tqdm(firsts, desc=f"d-vectors n={n}", disable=not progress):
        if v < -1 or (total is not None and v + floor * (n - 1) > total[1]):
            continue
        d[0] = v
        l = rays[0]
        yield from rec(1, v * l[0], v * l[1], v)


def strongly_lo_classes(
    X: ToricSurface,
    ceilings: Sequence[int],
    floor: int = -1,
    total: Optional[Tuple[int, int]] = None,
    progress: bool = False,
) -> List[DivisorClass]:
    out = []
    for d in enumerate_d_vectors(X, ceilings, floor, total, progress):
        D = DivisorClass(d, X)
        if euler_char(-D) != 0:
            continue
        if is_strongly_left_orthogonal(X, D):
            out.append(D)
    return out


# ---------- standard systems and augmentations ----------

@dataclass(frozen=True)
class StandardSystem:
    system: ToricSystem
    kind: str               # "plane", "i" or "ii"
    s: Optional[int]
    exceptional: bool
    strong: bool
    cyclic: bool


def standard_systems(
    X: ToricSurface,
    basis: Optional[MinimalModelBasis] = None,
    s_range: Tuple[int, int] = (-1, 5),
) -> List[StandardSystem]:
    """
    H, H, H on the plane; on F_a the systems of type i for s in s_range and,
    for even a, those of type ii. With a basis of a blow-up the classes are
    the pulled back ones.
    """
    if basis is None:
        if X.n not in (3, 4):
            raise UnsupportedSurfaceError(f"standard systems live on the plane or F_a, got {X.n} rays")
        basis = minimal_model_basis(X, [])
    if basis.model == "plane":
        H = basis.elements[0]
        return [StandardSystem(ToricSystem((H, H, H)), "plane", None, True, True, True)]
    out = []
    kinds = ("i", "ii") if basis.a % 2 == 0 else ("i",)
    for kind in kinds:
        for s in range(s_range[0], s_range[1] + 1):
            exc, strong, cyc = expected_hirzebruch_labels(basis.a, kind, s)
            out.append(StandardSystem(hirzebruch_system(X, basis, s, kind), kind, s, exc, strong, cyc))
    return out


@dataclass(frozen=True)
class Augmentation:
    system: ToricSystem
    base: StandardSystem
    order: Tuple[int, ...]      # 0-based indices of R_1..R_t in augmentation order
    slots: Tuple[int, ...]
    admissible: bool


def all_standard_augmentations(
    X: ToricSurface,
    basis: MinimalModelBasis,
    s_range: Tuple[int, int] = (-1, 5),
    admissible_only: bool = False,
) -> Iterator[Augmentation]:
    """
    Augment every exceptional standard system by R_1..R_t in every order
    and at every cyclic slot. Each resulting system is produced once.
    """
    R = basis.exceptional
    t = len(R)
    seen = set()
    for base in standard_systems(X, basis, s_range):
        if not base.exceptional:
            continue
        n0 = base.system.n
        for order in itertools.permutations(range(t)):
            for slots in itertools.product(*[range(n0 + k) for k in range(t)]):
                S = base.system
                for j, slot in zip(order, slots):
                    S = augment(S, slot, R[j])
                key = tuple(A.coords for A in S.classes)
                if key in seen:
                    continue
                seen.add(key)
                ok = is_admissible(S, basis)
                if admissible_only and not ok:
                    continue
                yield Augmentation(S, base, tuple(order), tuple(slots), ok)


# ---------- two-round blow-ups ----------

@dataclass(frozen=True)
class TwoRoundBlowup:
    """
    X obtained from the plane or F_a by blowing up the cones `first` of the
    base simultaneously, then the cones `second` of the intermediate surface.
    """
    surface: ToricSurface
    base: ToricSurface
    first: Tuple[int, ...]
    second: Tuple[int, ...]
    basis: MinimalModelBasis

    @property
    def s(self) -> int:
        return len(self.first)

    @property
    def t(self) -> int:
        return len(self.first) + len(self.second)


def _blow_up_round(X: ToricSurface, cones: Sequence[int], label: str) -> ToricSurface:
    cones = sorted(int(c) for c in cones)
    if len(set(cones)) != len(cones):
        raise TwoRoundError(f"{label} round repeats a cone: {cones}")
    bad = [c for c in cones if not 0 <= c < X.n]
    if bad:
        raise TwoRoundError(f"{label} round names cones {bad} outside [0, {X.n})")
    # ascending order: k rays inserted so far all sit before cone c
    for k, c in enumerate(cones):
        X = blow_up(X, c + k)
    return X


def two_round_blowup(
    base: ToricSurface,
    first: Sequence[int],
    second: Sequence[int] = (),
    q_ray: Optional[Tuple[int, int]] = None,
) -> TwoRoundBlowup:
    if base.n not in (3, 4):
        raise TwoRoundError(f"the base must be the plane or a Hirzebruch surface, got {base.n} rays")
    X0 = ToricSurface(base.rays)
    Xs = _blow_up_round(X0, first, "first")
    X = _blow_up_round(Xs, second, "second")
    steps = X.history.steps if X.history else ()
    basis = minimal_model_basis(X, list(reversed(steps)), q_ray=q_ray)
    return TwoRoundBlowup(X, X0, tuple(sorted(first)), tuple(sorted(second)), basis)


def random_two_round_blowup(rng: random.Random, max_rank: int = 14) -> TwoRoundBlowup:
    bases = [(1, 1, 1), (0, 0, 0, 0), (0, 1, 0, -1), (0, 2, 0, -2), (0, 3, 0, -3)]
    X0 = from_a_sequence(rng.choice(bases))
    room = max_rank - X0.rank
    if room < 1:
        raise ValueError(f"max_rank {max_rank} leaves no room for blow-ups")
    first = sorted(rng.sample(range(X0.n), rng.randint(1, min(X0.n, room))))
    Xs = _blow_up_round(X0, first, "first")
    k = rng.randint(0, min(Xs.n, room - len(first)))
    second = sorted(rng.sample(range(Xs.n), k))
    return two_round_blowup(X0, first, second)


def _first_chain(R: Sequence[DivisorClass], top: DivisorClass) -> List[DivisorClass]:
    # R_s, R_{s-1} - R_s, ..., R_1 - R_2, top - R_1
    if not R:
        return [top]
    out = [R[-1]]
    out += [R[i - 1] - R[i] for i in range(len(R) - 1, 0, -1)]
    out.append(top - R[0])
    return out


def _second_chain(R: Sequence[DivisorClass], top: DivisorClass) -> List[DivisorClass]:
    # top - R_{s+1}, R_{s+1} - R_{s+2}, ..., R_t
    if not R:
        return [top]
    out = [top - R[0]]
    out += [R[i] - R[i + 1] for i in range(len(R) - 1)]
    out.append(R[-1])
    return out


def _total(classes: Sequence[DivisorClass], zero: DivisorClass) -> DivisorClass:
    out = zero
    for D in classes:
        out = out + D
    return out


def two_round_plane_system(blowup: TwoRoundBlowup) -> ToricSystem:
    """
    R_s, ..., R_1 - R_2, H - R_1, H - R_{s+1}, ..., R_t, H - sum R_i.
    """
    b = blowup.basis
    if b.model != "plane":
        raise TwoRoundError("the base of this blow-up is not the plane")
    H, R = b.elements[0], b.exceptional
    s = blowup.s
    classes = _first_chain(R[:s], H) + _second_chain(R[s:], H)
    classes.append(H - _total(R, blowup.surface.zero()))
    return ToricSystem(tuple(classes))


def two_round_hirzebruch_system(blowup: TwoRoundBlowup, n: int) -> ToricSystem:
    """
    R_s, ..., P - R_1, nP + Q, P - R_{s+1}, ..., R_t, -(a+n)P + Q - sum R_i.
    """
    if n < -1:
        raise ValueError(f"n must be >= -1, got {n}")
    b = blowup.basis
    if b.model != "hirzebruch":
        raise TwoRoundError("the base of this blow-up is not a Hirzebruch surface")
    P, Q, R = b.elements[0], b.elements[1], b.exceptional
    s = blowup.s
    classes = _first_chain(R[:s], P) + [n * P + Q] + _second_chain(R[s:], P)
    classes.append((-(b.a + n)) * P + Q - _total(R, blowup.surface.zero()))
    return ToricSystem(tuple(classes))


def two_round_system(blowup: TwoRoundBlowup, n: int = 0) -> ToricSystem:
    if blowup.basis.model == "plane":
        return two_round_plane_system(blowup)
    return two_round_hirzebruch_system(blowup, n)


# F_1 with rays (1,0), (0,1), (-1,0), (-1,-1), blown up four times so that
# the result has a-sequence (-1, 0, -2, -2, -1, -3, -2, -1)
EXAMPLE_FAMILY_BASE = ((1, 0), (0, 1), (-1, 0), (-1, -1))
EXAMPLE_FAMILY_CONES = (3, 4, 2, 3)


def example_family_surface() -> Tuple[ToricSurface, MinimalModelBasis]:
    X = from_rays(EXAMPLE_FAMILY_BASE)
    for c in EXAMPLE_FAMILY_CONES:
        X = blow_up(X, c)
    return X, minimal_model_basis(X, list(reversed(X.history.steps)))


def example_family_system(s: int, surface: Optional[Tuple[ToricSurface, MinimalModelBasis]] = None) -> ToricSystem:
    """
    R1, R3 - R1, P - R3, sP + Q, P - R2, R2 - R4, R4, -(s+1)P + Q - R1 - R2 - R3 - R4.
    """
    X, b = surface or example_family_surface()
    P, Q, R1, R2, R3, R4 = b.elements
    return ToricSystem((
        R1, R3 - R1, P - R3, s * P + Q, P - R2, R2 - R4, R4,
        (-(s + 1)) * P + Q - R1 - R2 - R3 - R4,
    ))


# ---------- del Pezzo lattices ----------

# (beta, gamma_1..gamma_6) in the basis H, R_1..R_6
DEL_PEZZO_ROWS = (
    (1, (-1, -1, 0, 0, -1, 0)),
    (0, (0, 1, 0, 0, 0, 0)),
    (0, (1, -1, 0, 0, 0, 0)),
    (1, (-1, 0, -1, -1, 0, 0)),
    (0, (0, 0, 0, 1, 0, 0)),
    (0, (0, 0, 1, -1, 0, 0)),
    (1, (0, 0, -1, 0, -1, -1)),
    (0, (0, 0, 0, 0, 0, 1)),
    (0, (0, 0, 0, 0, 1, -1)),
)


def del_pezzo_system(rank: int) -> Tuple[IntersectionLattice, ToricSystem]:
    """
    Cyclic toric system on the Picard lattice of the plane blown up in
    rank - 1 general points. Smaller ranks forget R_rank .. R_6 and drop
    members that become zero.
    """
    if rank > 7:
        raise ValueError(f"rank {rank} > 7: no cyclic strongly exceptional toric system exists")
    if rank < 1:
        raise ValueError(f"rank must be positive, got {rank}")
    t = rank - 1
    L = IntersectionLattice.plane_blowup(t)
    classes = []
    for beta, gammas in DEL_PEZZO_ROWS:
        coords = (beta,) + gammas[:t]
        if any(coords):
            classes.append(L.element(coords))
    return L, ToricSystem(tuple(classes))


# ---------- exhaustive search ----------

def _add(u: DVector, v: DVector) -> DVector:
    return tuple(x + y for x, y in zip(u, v))


def _sub(u: DVector, v: DVector) -> DVector:
    return tuple(x - y for x, y in zip(u, v))


def system_key(system: ToricSystem) -> SystemKey:
    return tuple(A.coords for A in system.classes)


def canonical_key(system: ToricSystem, cyclic: bool) -> SystemKey:
    """
    Strong case: min over S and A_{n-1}, ..., A_1, A_n.
    Cyclic case: min over all rotations of S and of its reversal.
    """
    if not cyclic:
        return min(system_key(system), system_key(system.reversed()))
    keys = []
    for S in (system, system.reversed()):
        keys += [system_key(S.rotate(k)) for k in range(S.n)]
    return min(keys)


class _SearchTree:
    """
    Depth-first search over A_1, ..., A_{n-1} drawn from a fixed candidate
    list; A_n is -K minus the rest.
    """

    def __init__(self, X: ToricSurface, candidates: Sequence[DVector], cyclic: bool):
        self.X = X
        self.cands = [DivisorClass(tuple(d), X) for d in candidates]
        self.cyclic = cyclic
        self.n = X.n
        self.minus_k = anticanonical_class(X).coords
        self.prod = [[intersect(a, b) for b in self.cands] for a in self.cands]
        self._slo: Dict[DVector, bool] = {}

    def slo(self, d: DVector) -> bool:
        hit = self._slo.get(d)
        if hit is None:
            D = DivisorClass(d, self.X)
            hit = degree_bound_check(self.X, D) and is_strongly_left_orthogonal(self.X, D)
            self._slo[d] = hit
        return hit

    def run(self, firsts: Sequence[int]) -> List[SystemKey]:
        found = set()
        for j in firsts:
            d = self.cands[j].coords
            if self.cyclic and self.n > 2 and not self.slo(_sub(self.minus_k, d)):
                continue
            self._extend([j], [d], found)
        return sorted(found)

    def _extend(self, seq: List[int], sums: List[DVector], found: set) -> None:
        k = len(seq)
        if k == self.n - 1:
            self._close(seq, sums[-1], found)
            return
        prev = seq[-1]
        for j in range(len(self.cands)):
            if self.prod[prev][j] != 1:
                continue
            if any(self.prod[i][j] != 0 for i in seq[:-1]):
                continue
            new_sum = _add(sums[-1], self.cands[j].coords)
            if not self.slo(new_sum):
                continue
            if any(not self.slo(_sub(new_sum, sums[start - 1])) for start in range(1, k)):
                continue
            if self.cyclic and not self.slo(_sub(self.minus_k, new_sum)):
                continue
            self._extend(seq + [j], sums + [new_sum], found)

    def _close(self, seq: List[int], partial: DVector, found: set) -> None:
        X = self.X
        last = DivisorClass(_sub(self.minus_k, partial), X)
        S = ToricSystem(tuple(self.cands[j] for j in seq) + (last,))
        if not validate(S) or not is_left_orthogonal(X, last):
            return
        if self.cyclic and not is_cyclic_strongly_exceptional(X, S):
            return
        found.add(canonical_key(S, self.cyclic))


def _search_shard(args) -> List[SystemKey]:
    rays, candidates, cyclic, firsts = args
    return _SearchTree(ToricSurface(rays), candidates, cyclic).run(firsts)


def default_jobs() -> int:
    return max(1, int(os.environ.get("TORIC_JOBS", "1")))


def search_strongly_exceptional(
    X: ToricSurface,
    bounds: Optional[SearchBounds] = None,
    cyclic: bool = False,
    jobs: Optional[int] = None,
    progress: bool = False,
) -> List[ToricSystem]:
    """
    All (cyclic) strongly exceptional toric systems whose members A_1..A_{n-1}
    have d-vectors inside the box, one per symmetry class, sorted by key.
    Completeness holds only relative to the box.
    """
    bounds = bounds or SearchBounds()
    ceilings = bounds.ceilings(X)
    cands = [D.coords for D in strongly_lo_classes(X, ceilings, bounds.d_floor, (0, sum(ceilings)))]
    jobs = default_jobs() if jobs is None else max(1, jobs)
    X = ToricSurface(X.rays)
    firsts = list(range(len(cands)))
    if jobs == 1 or len(firsts) < 2:
        tree = _SearchTree(X, cands, cyclic)
        keys = set()
        for j in tqdm(firsts, desc="search", disable=not progress):
            keys.update(tree.run([j]))
    else:
        shards = [(X.rays, cands, cyclic, firsts[w::jobs]) for w in range(jobs)]
        with Pool(processes=jobs) as pool:
            parts = pool.map(_search_shard, shards)
        keys = set(itertools.chain.from_iterable(parts))
    return [ToricSystem(tuple(DivisorClass(d, X) for d in key)) for key in sorted(keys)]


# ---------- classifications ----------

def classify_strongly_LO(
    X: ToricSurface,
    chi_max: int,
    bounds: Optional[SearchBounds] = None,
    progress: bool = False,
) -> Dict[int, List[DivisorClass]]:
    """
    Strongly left-orthogonal classes grouped by chi = sum d_i, 0 <= chi <= chi_max.

    The box d_i in [-1, chi_max + 1] is complete: singleton intervals give the
    floor, the complementary interval of length n - 1 gives the ceiling.
    """
    if chi_max < 0:
        raise ValueError(f"chi_max must be non-negative, got {chi_max}")
    ceilings = [chi_max + 1] * X.n
    floor = -1
    if bounds is not None:
        ceilings = [min(c, b) for c, b in zip(ceilings, bounds.ceilings(X))]
        floor = max(floor, bounds.d_floor)
    grouped: Dict[int, List[DivisorClass]] = {chi: [] for chi in range(chi_max + 1)}
    for D in strongly_lo_classes(X, ceilings, floor, (0, chi_max), progress):
        grouped[sum(D.coords)].append(D)
    for chi in grouped:
        grouped[chi].sort(key=lambda D: D.coords)
    return grouped


def fan_symmetries(X: ToricSurface) -> List[Tuple[int, ...]]:
    """
    Rotations and reflections sigma of the ray cycle with a_{sigma(i)} = a_i.
    """
    a, n = X.a_sequence, X.n
    out = []
    for r in range(n):
        for sign in (1, -1):
            sigma = tuple((r + sign * i) % n for i in range(n))
            if all(a[sigma[i]] == a[i] for i in range(n)) and sigma not in out:
                out.append(sigma)
    return out


def symmetry_canonical(X: ToricSurface, d: DVector, symmetries: Optional[List[Tuple[int, ...]]] = None) -> DVector:
    symmetries = symmetries if symmetries is not None else fan_symmetries(X)
    best = None
    for sigma in symmetries:
        moved = [0] * len(d)
        for i, x in enumerate(d):
            moved[sigma[i]] = x
        cand = tuple(moved)
        if best is None or cand < best:
            best = cand
    return best


def classify_straightened(X: ToricSurface, chi_max: Optional[int] = None, progress: bool = False) -> List[DivisorClass]:
    """
    Straightened divisors up to automorphisms of the fan: strongly
    left-orthogonal, effective, not a -1 curve, with no -1 ray of
    coefficient 0 or 1. chi_max defaults to K^2 = 12 - n.
    """
    chi_max = 12 - X.n if chi_max is None else chi_max
    if chi_max < 0:
        return []
    syms = fan_symmetries(X)
    orbits = set()
    for group in classify_strongly_LO(X, chi_max, progress=progress).values():
        for D in group:
            if not is_straightened(X, D) or h0(X, D) == 0:
                continue
            orbits.add(symmetry_canonical(X, D.coords, syms))
    return [DivisorClass(d, X) for d in sorted(orbits)]


def has_augmentation_corner(X: ToricSurface, D: DivisorClass) -> bool:
    """
    True when the section polygon of D has a lattice vertex, i.e. a lattice
    point m of G_D on two boundary lines l_i(m) = -c_i with independent l_i.
    """
    rep = cohomology(X, D)
    c = rep.c
    for m in rep.sections:
        tight = [i for i, l in enumerate(X.rays) if l[0] * m[0] + l[1] * m[1] == -c[i]]
        if any(det2(X.rays[i], X.rays[j]) != 0 for i, j in itertools.combinations(tight, 2)):
            return True
    return False


# ---------- Hirzebruch brute force ----------

@dataclass(frozen=True)
class HirzebruchRow:
    coeffs: Tuple[Tuple[int, int], ...]      # (alpha, beta) of each member
    rotation: Optional[int]                  # rotation bringing it to type i / ii
    kind: Optional[str]
    s: Optional[int]
    exceptional: bool
    strong: bool
    cyclic: bool
    expected: Optional[Tuple[bool, bool, bool]]

    @property
    def labels(self) -> Tuple[bool, bool, bool]:
        return self.exceptional, self.strong, self.cyclic


def hirzebruch_surface(a: int) -> Tuple[ToricSurface, MinimalModelBasis]:
    if a < 0:
        raise ValueError(f"a must be non-negative, got {a}")
    X = from_a_sequence((0, a, 0, -a))
    return X, minimal_model_basis(X, [])


def brute_force_hirzebruch_systems(a: int, bound: int, progress: bool = False) -> List[HirzebruchRow]:
    """
    Every 4-term toric system on F_a whose members alpha P + beta Q satisfy
    |alpha|, |beta| <= bound, with exact exceptional / strong / cyclic labels.
    """
    X, basis = hirzebruch_surface(a)

    def dot(u, v):
        return u[0] * v[1] + v[0] * u[1] + a * u[1] * v[1]

    box = [(x, y) for x in range(-bound, bound + 1) for y in range(-bound, bound + 1)]
    partners = {u: [v for v in box if dot(u, v) == 1] for u in box}
    mk = (2 - a, 2)
    found = []
    for A1 in tqdm(box, desc=f"F{a} systems", disable=not progress):
        for A2 in partners[A1]:
            for A3 in partners[A2]:
                if dot(A1, A3) != 0:
                    continue
                A4 = (mk[0] - A1[0] - A2[0] - A3[0], mk[1] - A1[1] - A2[1] - A3[1])
                if max(abs(A4[0]), abs(A4[1])) > bound:
                    continue
                if dot(A4, A1) != 1 or dot(A4, A3) != 1 or dot(A4, A2) != 0:
                    continue
                found.append((A1, A2, A3, A4))
    rows = []
    for coeffs in sorted(found):
        S = ToricSystem(tuple(basis.from_coordinates(c) for c in coeffs))
        exc = is_exceptional(X, S)
        strong = exc and is_strongly_exceptional(X, S)
        cyc = strong and is_cyclic_strongly_exceptional(X, S)
        rotation, cl = None, classify_hirzebruch_system(X, basis, S)
        if cl.kind is not None:
            rotation = 0
        else:
            cl = classify_hirzebruch_system(X, basis, S.rotate(1))
            rotation = 1 if cl.kind is not None else None
        expected = (cl.exceptional, cl.strong, cl.cyclic) if rotation == 0 else None
        rows.append(HirzebruchRow(tuple(coeffs), rotation, cl.kind, cl.s, exc, strong, cyc, expected))
    return rows


# ---------- tabulated systems ----------

@dataclass(frozen=True)
class TableSystem:
    name: str
    surface: ToricSurface
    basis: MinimalModelBasis
    system: ToricSystem


def row_system(row: SystemRow) -> TableSystem:
    X = from_a_sequence(row.a)
    basis = basis_from_underlines(X, row.underlined, row.q_ray)
    return TableSystem(row.name, X, basis, ToricSystem(tuple(basis.parse(e) for e in row.classes)))


def cyclic_table_systems() -> List[TableSystem]:
    """
    One cyclic strongly exceptional system on each surface with nef -K.
    """
    out = []
    X = from_a_sequence((1, 1, 1))
    b = minimal_model_basis(X, [])
    H = b.elements[0]
    out.append(TableSystem("P2", X, b, ToricSystem((H, H, H))))
    for name, a in (("P1xP1", 0), ("F1", 1), ("F2", 2)):
        X, b = hirzebruch_surface(a)
        out.append(TableSystem(name, X, b, hirzebruch_system(X, b, -1, "i")))
    out += [row_system(r) for r in DEL_PEZZO_SYSTEMS + CYCLIC_SYSTEMS]
    return out


# ---------- table reproduction ----------

@dataclass
class TableReport:
    name: str
    unit: str
    expected: int
    matched: int
    missing: List[str] = field(default_factory=list)
    extra: List[str] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.missing and not self.extra

    def summary(self) -> str:
        return f"{self.matched}/{self.expected} {self.unit} match"

    def lines(self) -> List[str]:
        out = [f"[{self.name}] {self.summary()}"]
        out += [f"- {m}" for m in self.missing]
        out += [f"+ {e}" for e in self.extra]
        out += [f"# {n}" for n in self.notes]
        return out


def _diff(name: str, unit: str, expected: Dict, found: Dict) -> TableReport:
    missing = [expected[k] for k in sorted(expected) if k not in found]
    extra = [found[k] for k in sorted(found) if k not in expected]
    matched = sum(1 for k in expected if k in found)
    return TableReport(name, unit, len(expected), matched, missing, extra)


def reproduce_nef_surfaces(progress: bool = False) -> TableReport:
    expected = {canonical_form(a): f"{name} {list(a)}" for name, a in NEF_SURFACES}
    found = {}
    for n in range(3, 10):
        for X in enumerate_surfaces(n, -2, progress=progress):
            found[canonical_form(X.a_sequence)] = str(list(X.a_sequence))
    return _diff("nef-surfaces", "surfaces", expected, found)


def reproduce_cyclic_systems(progress: bool = False) -> TableReport:
    nef = {canonical_form(a) for _, a in NEF_SURFACES}
    rows = cyclic_table_systems()
    report = TableReport("cyclic-systems", "systems", len(rows), 0)
    for row in tqdm(rows, desc="cyclic systems", disable=not progress):
        text = ", ".join(row.basis.format(A) for A in row.system.classes)
        rep = validate(row.system)
        if not rep:
            report.missing.append(f"{row.name}: not a toric system ({'; '.join(rep.violations)})")
            continue
        if not is_cyclic_strongly_exceptional(row.surface, row.system):
            report.missing.append(f"{row.name}: {text} is not cyclic strongly exceptional")
            continue
        report.matched += 1
        Y = gale_dual(row.system)
        if canonical_form(Y.a_sequence) not in nef:
            report.extra.append(f"{row.name}: associated surface {list(Y.a_sequence)} has non-nef -K")
    return report


def reproduce_straightened(s_range: Tuple[int, int] = (-1, 5), progress: bool = False) -> TableReport:
    expected: Dict[Tuple, str] = {}
    found: Dict[Tuple, str] = {}
    for row in STRAIGHTENED:
        X = from_a_sequence(row.a)
        basis = basis_from_underlines(X, row.underlined)
        syms = fan_symmetries(X)
        for e in row.divisors:
            expected[(row.name, symmetry_canonical(X, basis.parse(e).coords, syms))] = f"{row.name}: {e}"
        for D in classify_straightened(X, progress=progress):
            found[(row.name, D.coords)] = f"{row.name}: {basis.format(D)}"
    X = from_a_sequence((1, 1, 1))
    b = minimal_model_basis(X, [])
    for e in ("H", "2H"):
        expected[("P2", b.parse(e).coords)] = f"P2: {e}"
    for D in classify_straightened(X):
        found[("P2", D.coords)] = f"P2: {b.format(D)}"
    report = _diff("straightened", "divisors", expected, found)
    for a in range(0, 3):
        X, b = hirzebruch_surface(a)
        for coeffs in hirzebruch_straightened(a, range(s_range[0], s_range[1] + 1)):
            D = b.from_coordinates(coeffs)
            label = f"F{a}: {b.format(D)}"
            report.expected += 1
            if is_strongly_left_orthogonal(X, D):
                report.matched += 1
            else:
                report.missing.append(f"{label} is not strongly left-orthogonal")
    return report


def reproduce_slo(name: str, chi_max: Optional[int] = None, progress: bool = False) -> TableReport:
    surface_name, default_chi, rows = SLO_TABLES[name]
    chi_max = default_chi if chi_max is None else chi_max
    row = straightened_row(surface_name)
    X = from_a_sequence(row.a)
    basis = basis_from_underlines(X, row.underlined)
    expected: Dict[DVector, str] = {}
    notes: List[str] = []
    for listed, items in sorted(rows().items()):
        for coeffs in items:
            D = basis.from_named(coeffs)
            chi = euler_char(D)
            if chi != listed:
                notes.append(f"{basis.format(D)} listed with chi {listed}, Riemann-Roch gives {chi}")
            if chi <= chi_max:
                expected[D.coords] = f"chi={chi}: {basis.format(D)}"
    found = {
        D.coords: f"chi={chi}: {basis.format(D)}"
        for chi, group in classify_strongly_LO(X, chi_max, progress=progress).items()
        for D in group
    }
    report = _diff(name, "divisors", expected, found)
    report.notes = notes
    return report


TABLES = {
    "nef-surfaces": reproduce_nef_surfaces,
    "cyclic-systems": reproduce_cyclic_systems,
    "straightened": reproduce_straightened,
    "slo-8a": lambda progress=False: reproduce_slo("slo-8a", progress=progress),
    "slo-8c": lambda progress=False: reproduce_slo("slo-8c", progress=progress),
    "slo-9": lambda progress=False: reproduce_slo("slo-9", progress=progress),
}
TABLE_ALIASES = {str(k + 1): name for k, name in enumerate(TABLES)}


def reproduce_table(name: str, progress: bool = False) -> TableReport:
    key = TABLE_ALIASES.get(str(name), str(name))
    if key not in TABLES:
        raise KeyError(f"unknown table {name!r}; choose from {sorted(TABLES)} or 1..{len(TABLES)}")
    return TABLES[key](progress=progress)


# ---------- census ----------

def census_record(
    X: ToricSurface,
    bounds: Optional[SearchBounds] = None,
    cyclic: bool = False,
    jobs: Optional[int] = None,
    progress: bool = False,
) -> dict:
    bounds = bounds or SearchBounds()
    start = time.perf_counter()
    hits = search_strongly_exceptional(X, bounds, cyclic=cyclic, jobs=jobs, progress=progress)
    elapsed = time.perf_counter() - start
    try:
        verdict, witness = two_step_blowdown(X)
    except PlaneSurfaceError:
        verdict, witness = None, None
    return {
        "surface": {"a": list(X.a_sequence), "rays": [list(r) for r in X.rays]},
        "bounds": bounds.as_dict(),
        "cyclic": cyclic,
        "two_step": verdict,
        "two_step_witness": None if witness is None else [list(w) for w in witness],
        "hits": [[list(A.coords) for A in S.classes] for S in hits],
        "elapsed": round(elapsed, 3),
    }


def write_census(records: Sequence[dict], out_dir: str | Path) -> List[Path]:
    """
    One JSON document per surface plus census.csv; returns the written paths.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths: List[Path] = []
    rows = []
    for rec in records:
        a = rec["surface"]["a"]
        kind = "cyclic" if rec["cyclic"] else "strong"
        p = out_dir / f"census_{kind}_{'_'.join(str(x) for x in a)}.json"
        p.write_text(json.dumps(rec, indent=2), encoding="utf-8")
        paths.append(p)
        rows.append({
            "a_sequence": ",".join(str(x) for x in a),
            "n": len(a),
            "search": kind,
            "hits": len(rec["hits"]),
            "two_step": rec["two_step"],
            "elapsed": rec["elapsed"],
        })
    csv_path = out_dir / "census.csv"
    pd.DataFrame(rows).to_csv(csv_path, index=False, encoding="utf-8")
    paths.append(csv_path)
    return paths
