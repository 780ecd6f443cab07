# src/toric_surface.py
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from math import gcd
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

from tqdm import tqdm

from .linalg import det2
from .pic_lattice import DivisorClass, MinimalModelBasis, intersect

Ray = Tuple[int, int]


class FanError(ValueError):
    pass


class NotContractibleError(ValueError):
    pass


class PlaneSurfaceError(ValueError):
    pass


@dataclass(frozen=True)
class BlowupStep:
    """
    One toric blow-up: `ray` = left + right is inserted into the cone (left, right).
    Read backwards it is the contraction of `ray`.
    """
    ray: Ray
    left: Ray
    right: Ray


@dataclass(frozen=True)
class BlowupHistory:
    base: Tuple[Ray, ...]
    steps: Tuple[BlowupStep, ...] = ()

    @property
    def exceptional_ray_ids(self) -> Tuple[Ray, ...]:
        return tuple(s.ray for s in self.steps)

    def cone_indices(self) -> List[Tuple[int, int]]:
        """
        (surface size before the step, index of the subdivided cone) per step.
        """
        rays = list(self.base)
        out: List[Tuple[int, int]] = []
        for s in self.steps:
            i = rays.index(s.left)
            out.append((len(rays), i))
            rays.insert(i + 1, s.ray)
        return out

    def replay(self) -> "ToricSurface":
        X = from_rays(self.base)
        for n_before, i in self.cone_indices():
            X = blow_up(X, i)
        return X


@dataclass(frozen=True)
class BlowupTree:
    """
    Partial order on exceptional rays R_1..R_t (blow-up order).
    (j, i) in order means R_j >= R_i; (j, i) in cover means R_j was blown up on E_i.
    """
    rays: Tuple[Ray, ...]
    cover: FrozenSet[Tuple[int, int]]
    order: FrozenSet[Tuple[int, int]]

    def geq(self, j: int, i: int) -> bool:
        return (j, i) in self.order

    def incomparable(self, i: int, j: int) -> bool:
        return not self.geq(i, j) and not self.geq(j, i)

    def maximal(self) -> List[int]:
        return [i for i in range(len(self.rays)) if not any((j, i) in self.order for j in range(len(self.rays)) if j != i)]


@dataclass(frozen=True)
class ToricSurface:
    """
    Smooth complete toric surface given by its cyclically ordered rays (counterclockwise).
    """
    rays: Tuple[Ray, ...]
    history: Optional[BlowupHistory] = field(default=None, compare=False)

    def __post_init__(self):
        rays = tuple((int(x), int(y)) for x, y in self.rays)
        object.__setattr__(self, "rays", rays)
        _validate_rays(rays)

    @property
    def n(self) -> int:
        return len(self.rays)

    @property
    def rank(self) -> int:
        return self.n - 2

    @cached_property
    def a_sequence(self) -> Tuple[int, ...]:
        return _a_from_rays(self.rays)

    @cached_property
    def ray_index(self) -> Dict[Ray, int]:
        return {r: i for i, r in enumerate(self.rays)}

    @property
    def anticanonical(self) -> Tuple[int, ...]:
        return tuple(a + 2 for a in self.a_sequence)

    def pair(self, d: Sequence[int], e: Sequence[int]) -> int:
        c = _c_pinned(self, tuple(e), 0)
        return sum(int(x) * y for x, y in zip(d, c))

    def element(self, d: Sequence[int]) -> DivisorClass:
        d = tuple(int(x) for x in d)
        if len(d) != self.n:
            raise ValueError(f"d-vector has length {len(d)}, surface has {self.n} rays")
        sx = sum(di * l[0] for di, l in zip(d, self.rays))
        sy = sum(di * l[1] for di, l in zip(d, self.rays))
        if sx or sy:
            raise ValueError(f"d-vector {list(d)} does not satisfy sum d_i l_i = 0")
        return DivisorClass(d, self)

    def zero(self) -> DivisorClass:
        return DivisorClass((0,) * self.n, self)

    def D(self, i: int) -> DivisorClass:
        return invariant_divisor(self, i)

    def __repr__(self) -> str:
        return f"ToricSurface(a={list(self.a_sequence)})"


def _primitive(r: Ray) -> bool:
    return gcd(abs(r[0]), abs(r[1])) == 1


def _crosses_positive_axis(u: Ray, v: Ray) -> bool:
    # direction (1, 0) lies in the half-open cone [u, v)
    return det2(u, (1, 0)) >= 0 and det2((1, 0), v) > 0


def _a_from_rays(rays: Sequence[Ray]) -> Tuple[int, ...]:
    n = len(rays)
    out: List[int] = []
    for i in range(n):
        prev, cur, nxt = rays[i - 1], rays[i], rays[(i + 1) % n]
        s = (prev[0] + nxt[0], prev[1] + nxt[1])
        k = cur[0] if cur[0] != 0 else cur[1]
        comp = s[0] if cur[0] != 0 else s[1]
        a = -comp // k
        if (s[0] + a * cur[0], s[1] + a * cur[1]) != (0, 0):
            raise FanError(f"l_{i - 1} + l_{i + 1} is not a multiple of l_{i}")
        out.append(a)
    return tuple(out)


def _validate_rays(rays: Sequence[Ray]) -> None:
    n = len(rays)
    if n < 3:
        raise FanError(f"a complete fan needs at least 3 rays, got {n}")
    for r in rays:
        if r == (0, 0) or not _primitive(r):
            raise FanError(f"ray {r} is not primitive")
    for i in range(n):
        d = det2(rays[i], rays[(i + 1) % n])
        if d != 1:
            raise FanError(f"det(l_{i}, l_{i + 1}) = {d}, expected 1")
    winding = sum(_crosses_positive_axis(rays[i], rays[(i + 1) % n]) for i in range(n))
    if winding != 1:
        raise FanError(f"winding number {winding}, expected 1")
    a = _a_from_rays(rays)
    if sum(a) != 12 - 3 * n:
        raise FanError(f"sum of self-intersections {sum(a)} != {12 - 3 * n}")


def from_rays(rays: Sequence[Sequence[int]]) -> ToricSurface:
    return ToricSurface(tuple((int(r[0]), int(r[1])) for r in rays))


def rays_from_a_sequence(a: Sequence[int]) -> List[Ray]:
    n = len(a)
    rays: List[Ray] = [(1, 0), (0, 1)]
    for i in range(1, n + 1):
        prev, cur = rays[i - 1], rays[i]
        ai = a[i % n]
        rays.append((-prev[0] - ai * cur[0], -prev[1] - ai * cur[1]))
    if rays[n] != rays[0] or rays[n + 1] != rays[1]:
        raise FanError(f"a-sequence {list(a)} does not close up")
    return rays[:n]


def from_a_sequence(a: Sequence[int]) -> ToricSurface:
    """
    l_1 = (1,0), l_2 = (0,1), l_{i+1} = -l_{i-1} - a_i l_i.
    """
    a = [int(x) for x in a]
    n = len(a)
    if n < 3:
        raise FanError(f"a complete fan needs at least 3 rays, got {n}")
    if sum(a) != 12 - 3 * n:
        raise FanError(f"sum of a-sequence {sum(a)} != {12 - 3 * n}")
    return from_rays(rays_from_a_sequence(a))


def canonical_form(a: Sequence[int]) -> Tuple[int, ...]:
    """
    Lexicographic minimum over the 2n rotations and reflections of the cycle.
    """
    a = tuple(a)
    n = len(a)
    cands = []
    for seq in (a, a[::-1]):
        for k in range(n):
            cands.append(seq[k:] + seq[:k])
    return min(cands)


def canonical_surface(X: ToricSurface) -> ToricSurface:
    return from_a_sequence(canonical_form(X.a_sequence))


def is_isomorphic(X: ToricSurface, Y: ToricSurface) -> bool:
    return X.n == Y.n and canonical_form(X.a_sequence) == canonical_form(Y.a_sequence)


def blow_up(X: ToricSurface, i: int) -> ToricSurface:
    """
    Subdivide the cone (l_i, l_{i+1}) by l_i + l_{i+1}.
    """
    n = X.n
    if not 0 <= i < n:
        raise IndexError(f"cone index {i} outside [0, {n})")
    left, right = X.rays[i], X.rays[(i + 1) % n]
    new = (left[0] + right[0], left[1] + right[1])
    rays = list(X.rays)
    rays.insert(i + 1, new)
    base = X.history.base if X.history else X.rays
    steps = (X.history.steps if X.history else ()) + (BlowupStep(new, left, right),)
    return ToricSurface(tuple(rays), BlowupHistory(base, steps))


def blow_down(X: ToricSurface, i: int) -> ToricSurface:
    n = X.n
    if not 0 <= i < n:
        raise IndexError(f"ray index {i} outside [0, {n})")
    if X.a_sequence[i] != -1:
        raise NotContractibleError(f"ray {i} has self-intersection {X.a_sequence[i]}, expected -1")
    if n == 3:
        raise NotContractibleError("the plane has no contractible rays")
    ray = X.rays[i]
    rays = X.rays[:i] + X.rays[i + 1:]
    history = None
    if X.history is not None:
        steps = X.history.steps
        used_later = False
        for k, s in enumerate(steps):
            if s.ray == ray:
                used_later = any(t.left == ray or t.right == ray for t in steps[k + 1:])
                if not used_later:
                    history = BlowupHistory(X.history.base, steps[:k] + steps[k + 1:])
                break
    return ToricSurface(rays, history)


def contract_rays(X: ToricSurface, rays: Iterable[Ray]) -> ToricSurface:
    """
    Contract the given rays one after another (each must be -1 when its turn comes).
    """
    for r in rays:
        X = blow_down(X, X.ray_index[r])
    return X


def invariant_divisor(X: ToricSurface, i: int) -> DivisorClass:
    n = X.n
    d = [0] * n
    d[i] = X.a_sequence[i]
    d[(i - 1) % n] += 1
    d[(i + 1) % n] += 1
    return DivisorClass(tuple(d), X)


def d_vector(X: ToricSurface, D: DivisorClass) -> Tuple[int, ...]:
    if D.owner != X:
        raise ValueError("divisor class does not live on this surface")
    return D.coords


def d_from_c(X: ToricSurface, c: Sequence[int]) -> Tuple[int, ...]:
    """
    d_i = c_{i-1} + a_i c_i + c_{i+1}.
    """
    n, a = X.n, X.a_sequence
    return tuple(int(c[i - 1]) + a[i] * int(c[i]) + int(c[(i + 1) % n]) for i in range(n))


def class_from_c(X: ToricSurface, c: Sequence[int]) -> DivisorClass:
    return DivisorClass(d_from_c(X, c), X)


@lru_cache(maxsize=1 << 16)
def _c_pinned(X: ToricSurface, d: Tuple[int, ...], p: int) -> Tuple[int, ...]:
    n, a = X.n, X.a_sequence
    c = [0] * n
    for step in range(1, n - 1):
        k = (p + step) % n
        c[(k + 1) % n] = d[k] - c[k - 1] - a[k] * c[k]
    for k in (p, (p - 1) % n):
        if c[k - 1] + a[k] * c[k] + c[(k + 1) % n] != d[k]:
            raise ValueError(f"d-vector {list(d)} is not the class of a divisor on this surface")
    return tuple(c)


def c_representative(X: ToricSurface, D: DivisorClass, pin: int = 0) -> Tuple[int, ...]:
    """
    The unique c with c_pin = c_{pin+1} = 0 and D = sum c_i D_i.
    """
    return _c_pinned(X, d_vector(X, D), pin % X.n)


def is_nef(X: ToricSurface, D: DivisorClass) -> bool:
    return all(x >= 0 for x in d_vector(X, D))


def anticanonical_status(X: ToricSurface) -> str:
    a = X.a_sequence
    if all(x >= -1 for x in a):
        return "ample"
    if all(x >= -2 for x in a):
        return "nef"
    return "not-nef"


def anticanonical(X: ToricSurface) -> DivisorClass:
    return DivisorClass(X.anticanonical, X)


# ---------- refinements ----------

def _support_value(small: ToricSurface, c: Sequence[int], r: Ray) -> int:
    # value at r of the piecewise linear function taking c_i on l_i
    idx = small.ray_index.get(r)
    if idx is not None:
        return int(c[idx])
    n = small.n
    for p in range(n):
        lp, lq = small.rays[p], small.rays[(p + 1) % n]
        u, v = det2(r, lq), det2(lp, r)
        if u >= 0 and v >= 0:
            return u * int(c[p]) + v * int(c[(p + 1) % n])
    raise FanError(f"ray {r} lies in no cone of the coarser fan")


def pullback(small: ToricSurface, big: ToricSurface, D: DivisorClass) -> DivisorClass:
    """
    Pull a class back along the toric morphism big -> small (big refines small).
    """
    c = c_representative(small, D)
    c_big = [_support_value(small, c, r) for r in big.rays]
    return class_from_c(big, c_big)


def pushforward(big: ToricSurface, small: ToricSurface, D: DivisorClass, exact: bool = False) -> DivisorClass:
    """
    Push a class forward along big -> small by forgetting the contracted rays.
    With exact=True the class must be a pullback.
    """
    c = c_representative(big, D)
    c_small = [c[big.ray_index[r]] for r in small.rays]
    E = class_from_c(small, c_small)
    if exact and pullback(small, big, E) != D:
        raise ValueError("class is not pulled back from the coarser surface")
    return E


# ---------- minimal models ----------

def iter_contraction_sequences(X: ToricSurface, stop_at: Optional[int] = None) -> Iterator[List[BlowupStep]]:
    """
    Maximal contraction sequences (lists of BlowupStep in contraction order),
    generated lazily, lowest ray index first.

    With stop_at=None, contract while a -1 ray exists (ends at the plane or F_a,
    a != 1). With stop_at=4 the program stops at Hirzebruch surfaces.
    """

    def rec(Y: ToricSurface, acc: List[BlowupStep]) -> Iterator[List[BlowupStep]]:
        done = Y.n == 3 or (stop_at is not None and Y.n <= stop_at)
        cands = [] if done else [i for i, a in enumerate(Y.a_sequence) if a == -1]
        if not cands:
            if stop_at is None or Y.n == stop_at:
                yield list(acc)
            return
        for i in cands:
            step = BlowupStep(Y.rays[i], Y.rays[i - 1], Y.rays[(i + 1) % Y.n])
            yield from rec(blow_down(Y, i), acc + [step])

    yield from rec(ToricSurface(X.rays), [])


def minimal_model_program(
    X: ToricSurface,
    first_only: bool = False,
    stop_at: Optional[int] = None,
) -> List[List[BlowupStep]]:
    seqs = iter_contraction_sequences(X, stop_at)
    if first_only:
        first = next(seqs, None)
        return [] if first is None else [first]
    return list(seqs)


def stage_surfaces(X: ToricSurface, contractions: Sequence[BlowupStep]) -> List[ToricSurface]:
    """
    [X_0, X_1, ..., X_t] for a contraction sequence of X (X_t = X).
    """
    surfaces = [ToricSurface(X.rays)]
    for step in contractions:
        surfaces.append(contract_rays(surfaces[-1], [step.ray]))
    return surfaces[::-1]


def partial_order(X: ToricSurface, history: Optional[BlowupHistory] = None) -> BlowupTree:
    history = history or X.history
    if history is None:
        raise ValueError("surface carries no blow-up history")
    return _tree_from_steps(history.steps)


def _tree_from_steps(steps: Sequence[BlowupStep]) -> BlowupTree:
    rays = tuple(s.ray for s in steps)
    pos = {r: k for k, r in enumerate(rays)}
    cover = set()
    for j, s in enumerate(steps):
        for b in (s.left, s.right):
            i = pos.get(b)
            if i is not None and i < j:
                cover.add((j, i))
    order = {(i, i) for i in range(len(rays))} | set(cover)
    changed = True
    while changed:
        changed = False
        for (x, y) in list(order):
            for (u, v) in list(order):
                if y == u and (x, v) not in order:
                    order.add((x, v))
                    changed = True
    return BlowupTree(rays, frozenset(cover), frozenset(order))


def minimal_model_basis(
    X: ToricSurface,
    contractions: Sequence[BlowupStep],
    q_ray: Optional[Ray] = None,
    names: Optional[Sequence[str]] = None,
) -> MinimalModelBasis:
    """
    Basis H, R_1..R_t (or P, Q, R_1..R_t) on X for a contraction sequence.

    R_k is the total transform of the k-th exceptional curve counted from X_0
    upwards. On a Hirzebruch model Q is the ray with Q^2 = a >= 0 (q_ray
    chooses it when a = 0) and P an adjacent fiber.
    """
    X = ToricSurface(X.rays)
    surfaces = stage_surfaces(X, contractions)
    X0 = surfaces[0]
    blowups = list(contractions)[::-1]
    a0 = X0.a_sequence
    if X0.n == 3:
        model, a = "plane", 0
        head = [pullback(X0, X, invariant_divisor(X0, 0))]
    elif X0.n == 4:
        if q_ray is not None:
            if q_ray not in X0.ray_index:
                raise ValueError(f"ray {q_ray} is not a ray of the minimal model")
            qi = X0.ray_index[q_ray]
        else:
            qi = max(range(4), key=lambda i: (a0[i], -i))
        a = a0[qi]
        if a < 0:
            raise ValueError(f"Q must have non-negative self-intersection, ray {X0.rays[qi]} has {a}")
        pi = (qi + 1) % 4
        if a0[pi] != 0:
            pi = (qi - 1) % 4
        model = "hirzebruch"
        head = [pullback(X0, X, invariant_divisor(X0, pi)), pullback(X0, X, invariant_divisor(X0, qi))]
    else:
        raise ValueError(f"contractions end on a surface with {X0.n} rays")
    exc = []
    for k, step in enumerate(blowups):
        Xk = surfaces[k + 1]
        exc.append(pullback(Xk, X, invariant_divisor(Xk, Xk.ray_index[step.ray])))
    tree = _tree_from_steps(blowups)
    basis = MinimalModelBasis(model, a, tuple(head + exc), tree, tuple(blowups), _basis_names(model, names, len(exc)))
    return basis


def _basis_names(model: str, names: Optional[Sequence[str]], t: int) -> Tuple[str, ...]:
    head = ("H",) if model == "plane" else ("P", "Q")
    if names is None:
        return head + tuple(f"R{i}" for i in range(1, t + 1))
    if len(names) != t:
        raise ValueError(f"{len(names)} names for {t} exceptional classes")
    return head + tuple(names)


def contraction_order(X: ToricSurface, contracted: Sequence[int]) -> List[int]:
    """
    An order in which the given ray indices of X can be contracted one by one
    (lowest index first among the available -1 rays, with backtracking).
    """
    target = set(contracted)

    def rec(Y: ToricSurface, left: List[int], acc: List[int]) -> Optional[List[int]]:
        if not left:
            return acc
        for i in sorted(left):
            yi = Y.ray_index[X.rays[i]]
            if Y.a_sequence[yi] == -1 and Y.n > 3:
                found = rec(blow_down(Y, yi), [j for j in left if j != i], acc + [i])
                if found is not None:
                    return found
        return None

    order = rec(ToricSurface(X.rays), sorted(target), [])
    if order is None:
        raise NotContractibleError(f"rays {sorted(target)} cannot be contracted in any order")
    return order


def basis_from_underlines(
    X: ToricSurface,
    underlined: Sequence[int],
    q_ray: Optional[int] = None,
    order: Optional[Sequence[int]] = None,
) -> MinimalModelBasis:
    """
    Tabulated convention: the underlined rays (0-based indices of X) are
    contracted and named R1, R2, ... in the order given, so (0, 1, 5, 4)
    names ray 5 R3 and ray 4 R4; what remains is the minimal model. `q_ray`
    is a 0-based index of X.
    """
    underlined = [int(i) for i in underlined]
    if len(set(underlined)) != len(underlined):
        raise ValueError(f"repeated underlined ray in {underlined}")
    names = {i: f"R{k + 1}" for k, i in enumerate(underlined)}
    seq = list(order) if order is not None else contraction_order(X, underlined)
    steps: List[BlowupStep] = []
    Y = ToricSurface(X.rays)
    for i in seq:
        yi = Y.ray_index[X.rays[i]]
        steps.append(BlowupStep(Y.rays[yi], Y.rays[yi - 1], Y.rays[(yi + 1) % Y.n]))
        Y = blow_down(Y, yi)
    blowup_names = [names[X.ray_index[s.ray]] for s in steps][::-1]
    q = X.rays[q_ray] if q_ray is not None else None
    return minimal_model_basis(X, steps, q_ray=q, names=blowup_names)


# ---------- enumeration ----------

def enumerate_surfaces(
    n: int,
    a_min: int,
    a_max: Optional[int] = None,
    progress: bool = False,
) -> List[ToricSurface]:
    """
    All smooth complete toric surfaces with n rays and a_i in [a_min, a_max],
    one per isomorphism class, sorted by canonical a-sequence.
    """
    if a_max is None:
        a_max = 12 - 3 * n - a_min * (n - 1)
    if a_min > a_max:
        raise ValueError(f"a_min={a_min} > a_max={a_max}")
    total = 12 - 3 * n
    found: Dict[Tuple[int, ...], ToricSurface] = {}

    def rec(a: List[int], rays: List[Ray], crossings: int, first: int):
        k = len(a)
        if k == n:
            prev, cur = rays[n - 1], rays[n]
            wrap = (-prev[0] - a[0] * cur[0], -prev[1] - a[0] * cur[1])
            if sum(a) != total or cur != rays[0] or wrap != rays[1]:
                return
            canon = canonical_form(a)
            if canon not in found:
                try:
                    found[canon] = from_a_sequence(canon)
                except FanError:
                    pass
            return
        rest = n - k - 1
        s = sum(a)
        lo = max(first, total - s - rest * a_max)
        hi = min(a_max, total - s - rest * first)
        for v in range(lo, hi + 1):
            prev, cur = rays[k - 1], rays[k]
            nxt = (-prev[0] - v * cur[0], -prev[1] - v * cur[1])
            c = crossings + _crosses_positive_axis(cur, nxt)
            if c > 1:
                continue
            rec(a + [v], rays + [nxt], c, first)

    # a canonical rotation starts with a minimal entry: fix a_0 = first = min,
    # l_0 = (1, 0), l_1 = (0, 1); the cone (l_0, l_1) contains the reference direction
    for first in tqdm(range(a_min, a_max + 1), desc=f"surfaces n={n}", disable=not progress):
        rec([first], [(1, 0), (0, 1)], 1, first)
    return [found[k] for k in sorted(found)]


def two_step_blowdown(X: ToricSurface) -> Tuple[bool, Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]]]:
    """
    Can X be contracted to a Hirzebruch surface in at most two simultaneous
    rounds? Each round contracts a set of pairwise non-adjacent -1 rays.
    Returns (verdict, witness) with witness given as 0-based ray indices of X.
    """
    if X.n == 3:
        raise PlaneSurfaceError("the plane is not a blow-up of a Hirzebruch surface")
    if X.n == 4:
        return True, ((), ())

    def rounds(Y: ToricSurface, size: Optional[int]) -> Iterable[Tuple[int, ...]]:
        neg = [i for i, a in enumerate(Y.a_sequence) if a == -1]
        sizes = [size] if size is not None else range(len(neg), 0, -1)
        for k in sizes:
            for combo in itertools.combinations(neg, k):
                if all((j - i) % Y.n not in (1, Y.n - 1) for i, j in itertools.combinations(combo, 2)):
                    yield combo

    for first in rounds(X, None):
        if X.n - len(first) < 4:
            continue
        Y = contract_rays(X, [X.rays[i] for i in first])
        w1 = tuple(sorted(first))
        if Y.n == 4:
            return True, (w1, ())
        for second in rounds(Y, Y.n - 4):
            w2 = tuple(sorted(X.ray_index[Y.rays[i]] for i in second))
            return True, (w1, w2)
    return False, None


def lattice_coordinates(X: ToricSurface) -> List[DivisorClass]:
    """
    Z-basis D_2, ..., D_{n-1} of Pic(X) (0-based ray indices).
    """
    return [invariant_divisor(X, i) for i in range(2, X.n)]


def check_intersection_table(X: ToricSurface) -> bool:
    n = X.n
    for i in range(n):
        for j in range(n):
            v = intersect(invariant_divisor(X, i), invariant_divisor(X, j))
            want = X.a_sequence[i] if i == j else (1 if (j - i) % n in (1, n - 1) else 0)
            if v != want:
                return False
    return True
