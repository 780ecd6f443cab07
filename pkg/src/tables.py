# src/tables.py
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

# Expected data for the reproduction drivers. Ray indices are 0-based;
# exceptional classes R1, R2, ... are named in the order the underlined
# (contracted) rays are listed. Coefficient tuples below are in label
# order H, R1, R2, ...

Coeffs = Tuple[int, ...]

NEF_SURFACES: List[Tuple[str, Tuple[int, ...]]] = [
    ("P2", (1, 1, 1)),
    ("P1xP1", (0, 0, 0, 0)),
    ("F1", (0, 1, 0, -1)),
    ("F2", (0, 2, 0, -2)),
    ("5a", (0, 0, -1, -1, -1)),
    ("5b", (0, -2, -1, -1, 1)),
    ("6a", (-1, -1, -1, -1, -1, -1)),
    ("6b", (-1, -1, -2, -1, -1, 0)),
    ("6c", (0, 0, -2, -1, -2, -1)),
    ("6d", (0, 1, -2, -1, -2, -2)),
    ("7a", (-1, -1, -2, -1, -2, -1, -1)),
    ("7b", (-1, -1, 0, -2, -1, -2, -2)),
    ("8a", (-1, -2, -1, -2, -1, -2, -1, -2)),
    ("8b", (-1, -2, -2, -1, -2, -1, -1, -2)),
    ("8c", (-1, -2, -2, -2, -1, -2, 0, -2)),
    ("9", (-1, -2, -2, -1, -2, -2, -1, -2, -2)),
]


@dataclass(frozen=True)
class SystemRow:
    name: str
    a: Tuple[int, ...]
    underlined: Tuple[int, ...]
    classes: Tuple[str, ...]
    q_ray: Optional[int] = None


CYCLIC_SYSTEMS: List[SystemRow] = [
    SystemRow("5b", (-1, -2, 0, 1, -1), (0, 1),
              ("H-R1", "R1", "H-R1-R2", "R2", "H-R2")),
    SystemRow("6b", (-1, -2, -1, -1, 0, -1), (0, 1, 3),
              ("H-R1-R3", "R1", "H-R1-R2", "R2", "H-R2-R3", "R3")),
    SystemRow("6c", (-1, -2, 0, 0, -1, -2), (0, 1, 4),
              ("H-R1-R3", "R1", "H-R1-R2", "R2", "H-R2-R3", "R3")),
    SystemRow("6d", (-1, -2, -2, 0, 1, -2), (0, 1),
              ("P-R1", "R1", "Q-R1-R2", "R2", "P-R2", "Q-P")),
    SystemRow("7a", (-1, -1, -1, -1, -2, -1, -2), (0, 3, 4, 6),
              ("H-R1-R2", "R2", "R1-R2", "H-R1-R3-R4", "R4", "R3-R4", "H-R3")),
    SystemRow("7b", (-1, -2, 0, -1, -1, -2, -2), (0, 1, 5, 4),
              ("H-R1-R3", "R3", "R1-R3", "H-R1-R2-R4", "R4", "R2-R4", "H-R2")),
    SystemRow("8a", (-1, -2, -1, -2, -1, -2, -1, -2), (0, 2, 4, 6),
              ("P-R1-R4", "R1", "Q-R1-R2", "R2", "P-R2-R3", "R3", "Q-R3-R4", "R4"),
              q_ray=3),
    SystemRow("8b", (-1, -2, -1, -1, -2, -1, -2, -2), (0, 2, 4, 5, 7),
              ("H-R1-R2-R4", "R4", "R2-R4", "R1-R2", "H-R1-R3", "R3-R5", "R5", "H-R3-R5")),
    SystemRow("8c", (-1, -2, -2, -2, -1, -2, 0, -2), (0, 1, 3, 4),
              ("P-R1-R4", "R1", "Q-R1-R2", "R2", "P-R2-R3", "R3", "Q-R3-R4", "R4"),
              q_ray=6),
    SystemRow("9", (-1, -2, -2, -1, -2, -2, -1, -2, -2), (0, 1, 3, 4, 6, 7),
              ("H-R1-R4-R5", "R4", "R1-R4", "H-R1-R3-R6", "R6", "R3-R6", "H-R2-R3-R5", "R2", "R5-R2")),
]

# del Pezzo surfaces without an entry above: the plane blown up in two or
# three torus fixed points
DEL_PEZZO_SYSTEMS: List[SystemRow] = [
    SystemRow("5a", (0, 0, -1, -1, -1), (2, 4),
              ("H-R1-R2", "R2", "R1-R2", "H-R1", "H")),
    SystemRow("6a", (-1, -1, -1, -1, -1, -1), (0, 2, 4),
              ("H-R1-R2", "R2", "R1-R2", "H-R1-R3", "R3", "H-R3")),
]


@dataclass(frozen=True)
class StraightenedRow:
    name: str
    a: Tuple[int, ...]
    underlined: Tuple[int, ...]
    divisors: Tuple[str, ...]


STRAIGHTENED: List[StraightenedRow] = [
    StraightenedRow("6d", (-1, -2, -2, 0, 1, -2), (0, 1, 2), ("3H-2R1-R2-R3",)),
    StraightenedRow("8a", (-1, -2, -1, -2, -1, -2, -1, -2), (0, 2, 4, 5, 7),
                    ("4H-2(R1+R2+R3)-R4-R5",)),
    StraightenedRow("8c", (-1, -2, -2, -2, -1, -2, 0, -2), (0, 1, 2, 4, 5),
                    ("4H-2(R1+R2+R4)-R3-R5", "4H-2(R1+R3+R4)-R2-R5")),
    StraightenedRow("9", (-1, -2, -2, -1, -2, -2, -1, -2, -2), (0, 1, 3, 4, 6, 7),
                    ("4H-2(R1+R3+R5)-R2-R4-R6",)),
]


def hirzebruch_straightened(a: int, s_values: Iterable[int]) -> List[Coeffs]:
    """
    (alpha, beta) coefficients of P, Q + sP and, on F_2, 2Q - P.
    """
    out: List[Coeffs] = [(1, 0)]
    out += [(s, 1) for s in s_values]
    if a == 2:
        out.append((-1, 2))
    return out


# ---------- strongly left-orthogonal divisors of small Euler characteristic ----------

def _plane(beta: int, gammas: Dict[int, int], t: int) -> Coeffs:
    # gammas maps 1-based R index to its coefficient
    return (beta,) + tuple(gammas.get(k, 0) for k in range(1, t + 1))


def _neg(c: Coeffs) -> Coeffs:
    return tuple(-x for x in c)


def _common_rows(t: int) -> Dict[int, List[Coeffs]]:
    idx = range(1, t + 1)
    rows: Dict[int, List[Coeffs]] = {1: [], 2: [], 3: []}
    rows[1] += [_plane(0, {i: 1}, t) for i in idx]
    rows[1] += [_plane(1, {i: -1, j: -1}, t) for i, j in itertools.combinations(idx, 2)]
    rows[2] += [_plane(1, {i: -1}, t) for i in idx]
    rows[3] += [_plane(1, {}, t)]
    rows[3] += [_plane(2, {i: -1, j: -1, k: -1}, t) for i, j, k in itertools.combinations(idx, 3)]
    return rows


def slo_8a() -> Dict[int, List[Coeffs]]:
    t = 5
    idx = range(1, t + 1)
    rows = _common_rows(t)
    rows[0] = [_plane(0, {i: 1, j: -1}, t) for i, j in itertools.permutations(idx, 2)
               if {i, j} not in ({1, 5}, {3, 4})]
    for trip in itertools.combinations(idx, 3):
        if set(trip) in ({1, 2, 5}, {2, 3, 4}):
            continue
        c = _plane(1, {k: -1 for k in trip}, t)
        rows[0] += [c, _neg(c)]
    rows[1].append(_plane(2, {k: -1 for k in idx}, t))
    rows[2] += [_plane(2, {j: -1 for j in idx if j != i}, t) for i in idx]
    rows[3] += [_plane(3, {**{j: -1 for j in idx}, i: -2}, t) for i in idx]
    rows[4] = [_plane(2, {i: -1, j: -1}, t) for i, j in itertools.combinations(idx, 2)]
    rows[4] += [
        _plane(3, {**{j: -1 for j in idx if j not in (i, k)}, i: -2}, t)
        for i, k in itertools.permutations(idx, 2)
        if (i, k) not in ((1, 5), (3, 4))
    ]
    # a doubled collinear triple leaves K + D = H - R_i - R_j - R_k effective
    rows[4] += [
        _plane(4, {**{j: -1 for j in idx}, **{j: -2 for j in trip}}, t)
        for trip in itertools.combinations(idx, 3)
        if set(trip) not in ({1, 2, 5}, {2, 3, 4})
    ]
    rows[5] = [
        _plane(5, {**{j: -2 for j in idx}, i: -3, m: -1}, t)
        for i, m in itertools.permutations(idx, 2)
        if i in (1, 4, 5)
    ]
    return rows


def slo_8c() -> Dict[int, List[Coeffs]]:
    t = 5
    idx = range(1, t + 1)
    rows = _common_rows(t)
    rows[0] = []
    for i in (1, 2, 3):
        for j in (4, 5):
            c = _plane(0, {i: 1, j: -1}, t)
            rows[0] += [c, _neg(c)]
    for i, j in itertools.combinations((1, 2, 3), 2):
        for k in (4, 5):
            c = _plane(1, {i: -1, j: -1, k: -1}, t)
            rows[0] += [c, _neg(c)]
    rows[1].append(_plane(2, {k: -1 for k in idx}, t))
    rows[2] += [_plane(2, {j: -1 for j in idx if j != i}, t) for i in idx]
    rows[3] += [_plane(3, {**{j: -1 for j in idx}, i: -2}, t) for i in idx]
    rows[4] = [_plane(2, {i: -1, j: -1}, t) for i, j in itertools.combinations(idx, 2)]
    rows[4] += [
        _plane(3, {**{j: -1 for j in idx if j not in (i, k)}, i: -2}, t)
        for i, k in itertools.permutations(idx, 2)
        if (i, k) not in ((4, 5), (2, 3), (1, 3), (1, 2))
    ]
    rows[4] += [
        _plane(4, {**{j: -1 for j in idx}, i: -2, j: -2, k: -2}, t)
        for i, j in itertools.combinations((1, 2, 3), 2)
        for k in (4, 5)
    ]
    rows[5] = [
        _plane(5, {**{j: -2 for j in idx}, i: -3, m: -1}, t)
        for i, m in itertools.permutations(idx, 2)
        if i in (4, 5)
    ]
    return rows


def _avoids_pairs(trip: Sequence[int]) -> bool:
    s = set(trip)
    for pair, bad in (({1, 2}, ({5}, {6})), ({3, 4}, ({1}, {2})), ({5, 6}, ({3}, {4}))):
        if pair <= s and (s - pair) in bad:
            return False
    return True


def slo_9() -> Dict[int, List[Coeffs]]:
    t = 6
    idx = range(1, t + 1)
    rows = _common_rows(t)
    rows[0] = [_plane(0, {i: 1, j: -1}, t) for i, j in itertools.permutations(idx, 2)
               if {i, j} not in ({1, 2}, {3, 4}, {5, 6})]
    for trip in itertools.combinations(idx, 3):
        if not _avoids_pairs(trip):
            continue
        c = _plane(1, {k: -1 for k in trip}, t)
        rows[0] += [c, _neg(c)]
    rows[0].append(_plane(2, {k: -1 for k in idx}, t))
    rows[0].append(_neg(_plane(2, {k: -1 for k in idx}, t)))
    rows[1] += [_plane(2, {j: -1 for j in idx if j != i}, t) for i in idx]
    rows[2] += [_plane(2, {k: -1 for k in idx if k not in (i, j)}, t) for i, j in itertools.combinations(idx, 2)]
    rows[2] += [_plane(3, {**{j: -1 for j in idx}, i: -2}, t) for i in idx]
    rows[3] += [
        _plane(3, {**{k: -1 for k in idx if k not in (i, j)}, i: -2}, t)
        for i, j in itertools.permutations(idx, 2)
        if not (i % 2 == 1 and j == i + 1)
    ]
    rows[3] += [
        _plane(4, {**{k: -1 for k in idx}, **{k: -2 for k in trip}}, t)
        for trip in itertools.combinations(idx, 3)
        if _avoids_pairs(trip)
    ]
    rows[3].append(_plane(5, {k: -2 for k in idx}, t))
    return rows


SLO_TABLES = {
    "slo-8a": ("8a", 4, slo_8a),
    "slo-8c": ("8c", 4, slo_8c),
    "slo-9": ("9", 3, slo_9),
}


def straightened_row(name: str) -> StraightenedRow:
    for row in STRAIGHTENED:
        if row.name == name:
            return row
    raise KeyError(f"no straightened row named {name!r}")
