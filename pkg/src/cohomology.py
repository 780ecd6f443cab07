# src/cohomology.py
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import ceil, floor
from typing import FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from .linalg import det2
from .pic_lattice import DivisorClass, MinimalModelBasis, binom2, euler_char, project
from .toric_surface import (
    Ray,
    ToricSurface,
    c_representative,
    class_from_c,
    contract_rays,
    invariant_divisor,
    pushforward,
    stage_surfaces,
)

Point = Tuple[int, int]


class NotApplicableError(ValueError):
    pass


class DegenerateProjectionError(ValueError):
    pass


class StraighteningError(ValueError):
    pass


@dataclass(frozen=True)
class CohomologyReport:
    h0: int
    h1: int
    h2: int
    chi: int
    sections: Tuple[Point, ...]   # G_D
    interior: Tuple[Point, ...]   # G_D°, |G_D°| = h2(-D)
    c: Tuple[int, ...] = field(default=(), compare=False)

    def as_dict(self) -> dict:
        return {
            "h0": self.h0,
            "h1": self.h1,
            "h2": self.h2,
            "chi": self.chi,
            "sections": [list(p) for p in self.sections],
            "interior": [list(p) for p in self.interior],
            "c": list(self.c),
        }


@dataclass(frozen=True)
class TriangleCounts:
    total: int
    plus: int
    minus: int


@dataclass(frozen=True)
class TrianglePoints:
    gamma: int
    total: FrozenSet[Point]
    plus: FrozenSet[Point]
    minus: FrozenSet[Point]


@dataclass(frozen=True)
class TilingReport:
    lo: bool
    strong: bool

    def __bool__(self) -> bool:
        return self.strong


@dataclass(frozen=True)
class StraighteningResult:
    surface: ToricSurface
    divisor: DivisorClass
    contracted: Tuple[Ray, ...]
    flipped: bool = False


# ---------- lattice points ----------

@lru_cache(maxsize=1 << 15)
def chamber_points(rays: Tuple[Ray, ...], bounds: Tuple[int, ...]) -> Tuple[Point, ...]:
    """
    Lattice points m with <m, l_i> >= bounds_i for all i (a bounded polygon
    for a complete fan). Vertices are found exactly over all pairs of
    boundary lines; the integer bounding box is filtered with numpy.
    """
    n = len(rays)
    xs: List[Fraction] = []
    ys: List[Fraction] = []
    for i in range(n):
        for j in range(i + 1, n):
            d = det2(rays[i], rays[j])
            if d == 0:
                continue
            li, lj, bi, bj = rays[i], rays[j], bounds[i], bounds[j]
            x = Fraction(bi * lj[1] - li[1] * bj, d)
            y = Fraction(li[0] * bj - bi * lj[0], d)
            if all(l[0] * x + l[1] * y >= b for l, b in zip(rays, bounds)):
                xs.append(x)
                ys.append(y)
    if not xs:
        return ()
    x0, x1 = ceil(min(xs)), floor(max(xs))
    y0, y1 = ceil(min(ys)), floor(max(ys))
    if x0 > x1 or y0 > y1:
        return ()
    gx, gy = np.mgrid[x0:x1 + 1, y0:y1 + 1]
    pts = np.stack([gx.ravel(), gy.ravel()], axis=1).astype(np.int64)
    L = np.array(rays, dtype=np.int64)
    vals = pts @ L.T
    mask = (vals >= np.array(bounds, dtype=np.int64)).all(axis=1)
    return tuple(sorted((int(p[0]), int(p[1])) for p in pts[mask]))


@lru_cache(maxsize=1 << 16)
def _report(X: ToricSurface, d: Tuple[int, ...]) -> CohomologyReport:
    D = DivisorClass(d, X)
    c = c_representative(X, D)
    sections = chamber_points(X.rays, tuple(-x for x in c))
    interior = chamber_points(X.rays, tuple(1 - x for x in c))
    # Serre duality: h2(D) = h0(K - D), and K - D has c-vector -1 - c
    h2 = len(chamber_points(X.rays, tuple(1 + x for x in c)))
    h0 = len(sections)
    chi = euler_char(D)
    h1 = h0 + h2 - chi
    assert h1 >= 0, f"h1 = {h1} < 0 for d = {list(d)}"
    return CohomologyReport(h0, h1, h2, chi, sections, interior, c)


def cohomology(X: ToricSurface, D: DivisorClass) -> CohomologyReport:
    if D.owner != X:
        raise ValueError("divisor class does not live on this surface")
    return _report(X, D.coords)


def h0(X: ToricSurface, D: DivisorClass) -> int:
    return cohomology(X, D).h0


def is_left_orthogonal(X: ToricSurface, D: DivisorClass) -> bool:
    r = cohomology(X, -D)
    return r.chi == 0 and r.h1 == 0 and r.h0 == 0


def is_strongly_left_orthogonal(X: ToricSurface, D: DivisorClass) -> bool:
    if not is_left_orthogonal(X, D):
        return False
    r = cohomology(X, D)
    return r.h1 == 0 and r.h2 == 0


def is_pre_left_orthogonal(X: ToricSurface, D: DivisorClass, basis: MinimalModelBasis, strong: bool = False) -> bool:
    """
    h0((-D)_0) = h1(-D) = 0 (and h1(D) = 0 for the strong variant).
    """
    D0 = project(D, basis, 0)
    if D0.is_zero():
        raise DegenerateProjectionError("(D)_0 = 0, pre-left-orthogonality is undefined")
    if cohomology(X, -D0).h0 != 0 or cohomology(X, -D).h1 != 0:
        return False
    return not strong or cohomology(X, D).h1 == 0


# ---------- triangles and tilings ----------

def triangle_counts(gamma: int) -> TriangleCounts:
    if gamma > 0:
        raise NotApplicableError(f"triangles are defined for gamma <= 0, got {gamma}")
    return TriangleCounts(binom2(gamma - 1), binom2(gamma + 1), binom2(gamma))


def stage_divisors(X: ToricSurface, D: DivisorClass, basis: MinimalModelBasis) -> List[Tuple[ToricSurface, DivisorClass]]:
    """
    [(X_k, (D)_k on X_k) for k = 0..t].
    """
    return [(Xk, class_from_c(Xk, c)) for Xk, c in _stage_frames(X, D, basis)]


def _stage_frames(X: ToricSurface, D: DivisorClass, basis: MinimalModelBasis) -> List[Tuple[ToricSurface, Tuple[int, ...]]]:
    # (D)_k = pushforward of D: its c-vector on X restricted to the rays of X_k
    c = c_representative(X, D)
    contractions = list(basis.blowdown_sequence)[::-1]
    return [(Xk, tuple(c[X.ray_index[r]] for r in Xk.rays)) for Xk in stage_surfaces(X, contractions)]


def triangle_points(X: ToricSurface, D: DivisorClass, basis: MinimalModelBasis, k: int) -> TrianglePoints:
    """
    Triangle point sets cut at blow-up step k (1-based) by the coefficient gamma_k.
    """
    if not 1 <= k <= basis.t:
        raise ValueError(f"step {k} outside [1, {basis.t}]")
    gamma = basis.coordinates(D)[basis.head + k - 1]
    if gamma > 0:
        raise NotApplicableError(f"gamma_{k} = {gamma} > 0")
    step = basis.blowdown_sequence[k - 1]
    Xprev, c = _stage_frames(X, D, basis)[k - 1]
    cp, cq = c[Xprev.ray_index[step.left]], c[Xprev.ray_index[step.right]]
    return _triangles(step.left, step.right, cp, cq, gamma)


def _triangles(lp: Ray, lq: Ray, cp: int, cq: int, gamma: int) -> TrianglePoints:
    # m with l_p(m) = u - c_p, l_q(m) = v - c_q; the matrix (l_p; l_q) has det 1
    inv = ((lq[1], -lp[1]), (-lq[0], lp[0]))
    total, plus, minus = set(), set(), set()
    for u in range(0, -gamma + 1):
        for v in range(0, -gamma - u + 1):
            s, t = u - cp, v - cq
            m = (inv[0][0] * s + inv[0][1] * t, inv[1][0] * s + inv[1][1] * t)
            total.add(m)
            if u >= 1 and v >= 1:
                plus.add(m)
            if u + v < -gamma:
                minus.add(m)
    return TrianglePoints(gamma, frozenset(total), frozenset(plus), frozenset(minus))


def cutout_check(X: ToricSurface, D: DivisorClass, basis: MinimalModelBasis, k: int, strong: bool = False) -> bool:
    """
    T+ of step k lies in G° of (D)_{k-1}; for strong also T- lies in G of (D)_{k-1}.
    """
    tri = triangle_points(X, D, basis, k)
    Xprev, c = _stage_frames(X, D, basis)[k - 1]
    if not tri.plus <= set(chamber_points(Xprev.rays, tuple(1 - x for x in c))):
        return False
    return not strong or tri.minus <= set(chamber_points(Xprev.rays, tuple(-x for x in c)))


def _tiles(parts: Sequence[FrozenSet[Point]], whole: FrozenSet[Point]) -> bool:
    seen: set = set()
    for p in parts:
        if seen & p:
            return False
        seen |= p
    return seen == whole


def tiling_check(X: ToricSurface, D: DivisorClass, basis: MinimalModelBasis) -> TilingReport:
    """
    Decide (strong) left-orthogonality of D from the minimal model and the
    blow-up triangles; requires every gamma_i <= 0.

    lo: h0(-(D)_0) = h1(-(D)_0) = 0 and the T+ sets tile G°_{(D)_0}.
    strong: lo, h1((D)_0) = 0 and the T- sets tile G_{(D)_0} minus G_D.
    """
    coeffs = basis.coordinates(D)
    gammas = coeffs[basis.head:]
    if any(g > 0 for g in gammas):
        raise NotApplicableError(f"tiling needs gamma_i <= 0, got {list(gammas)}")
    frames = _stage_frames(X, D, basis)
    X0, c0 = frames[0]
    D0 = class_from_c(X0, c0)
    rep0 = cohomology(X0, D0)
    neg0 = cohomology(X0, -D0)
    sections0 = frozenset(chamber_points(X0.rays, tuple(-x for x in c0)))
    interior0 = frozenset(chamber_points(X0.rays, tuple(1 - x for x in c0)))
    tris = []
    for k in range(1, basis.t + 1):
        Xprev, c = frames[k - 1]
        step = basis.blowdown_sequence[k - 1]
        tris.append(_triangles(step.left, step.right, c[Xprev.ray_index[step.left]], c[Xprev.ray_index[step.right]], gammas[k - 1]))
    lo = (
        neg0.h0 == 0
        and neg0.h1 == 0
        and _tiles([t.plus for t in tris], interior0)
    )
    sections = frozenset(cohomology(X, D).sections)
    strong = (
        lo
        and rep0.h1 == 0
        and _tiles([t.minus for t in tris], sections0 - sections)
    )
    return TilingReport(lo, strong)


def degree_bound_check(X: ToricSurface, D: DivisorClass) -> bool:
    """
    Every proper cyclic interval sum of the d-vector is >= -1.
    """
    d = D.coords
    n = len(d)
    for start in range(n):
        s = 0
        for length in range(1, n):
            s += d[(start + length - 1) % n]
            if s < -1:
                return False
    return True


# ---------- straightening ----------

def _eligible_ray(X: ToricSurface, D: DivisorClass) -> Optional[int]:
    # gamma = -1 rays before gamma = 0 rays, then lowest index
    if X.n <= 3:
        return None
    found = [(D.coords[i] == 0, i) for i, a in enumerate(X.a_sequence) if a == -1 and D.coords[i] in (0, 1)]
    return min(found)[1] if found else None


def minus_one_curve(X: ToricSurface, D: DivisorClass) -> Optional[int]:
    """
    Index of the -1 ray whose prime divisor equals D, if any.
    """
    for i, a in enumerate(X.a_sequence):
        if a == -1 and invariant_divisor(X, i) == D:
            return i
    return None


def is_straightened(X: ToricSurface, D: DivisorClass) -> bool:
    return _eligible_ray(X, D) is None and minus_one_curve(X, D) is None


def straighten(X: ToricSurface, D: DivisorClass) -> StraighteningResult:
    """
    Contract -1 rays whose coefficient gamma = -d_i lies in {0, -1} until none
    is left. Rays with gamma = -1 go first, ties by lowest index, so sP+Q-R1
    on a blown-up F_a returns to F_a rather than to the plane. If h0(D) = 0
    the procedure runs on -D.
    """
    if not is_strongly_left_orthogonal(X, D):
        raise StraighteningError("divisor is not strongly left-orthogonal")
    i = minus_one_curve(X, D)
    if i is not None:
        raise StraighteningError(f"divisor is the -1 curve D_{i}")
    flipped = False
    if cohomology(X, D).h0 == 0:
        D, flipped = -D, True
    contracted: List[Ray] = []
    while True:
        i = _eligible_ray(X, D)
        if i is None:
            break
        gamma = -D.coords[i]
        ray = X.rays[i]
        Y = contract_rays(X, [ray])
        D = pushforward(X, Y, D - gamma * invariant_divisor(X, i), exact=True)
        X = Y
        contracted.append(ray)
    j = minus_one_curve(X, D)
    if j is not None:
        raise StraighteningError(f"straightening ends on the -1 curve D_{j} of {list(X.a_sequence)}")
    return StraighteningResult(X, D, tuple(contracted), flipped)
