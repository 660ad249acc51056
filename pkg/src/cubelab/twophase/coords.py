"""Coordinate layer for the two-phase search.

Phase 1 reduces (corner twist, edge flip, UD-slice location) to zero; phase 2
works inside the subgroup H with (corner permutation, UD-edge permutation,
slice-edge permutation). Every coordinate is 0 exactly at its phase goal.

Move indexing everywhere in the solver: m = 3*f + (power-1) with faces ordered
U,R,F,D,L,B and power 1/2/3 quarter turns clockwise.
"""

from __future__ import annotations

from math import comb

from ..cube import Move
from ..cubies import IDENTITY, MOVE_CUBIES, CubieState

FACE_ORDER = "URFDLB"
N_MOVES = 18

# phase-2 legal moves: U*, D*, and half turns of R,F,L,B
PHASE2_MOVES = (0, 1, 2, 9, 10, 11, 4, 7, 13, 16)
PHASE2_SET = frozenset(PHASE2_MOVES)

N_TWIST = 2187      # 3^7
N_FLIP = 2048       # 2^11
N_SLICE = 495       # C(12,4)
N_CPERM = 40320     # 8!
N_UDEP = 40320      # 8!
N_SLICEPERM = 24    # 4!


def move_name(m: int) -> str:
    return FACE_ORDER[m // 3] + str(m % 3 + 1)


def move_to_quarter_turns(m: int) -> list[Move]:
    face = FACE_ORDER[m // 3]
    power = m % 3 + 1
    if power == 1:
        return [Move(face)]
    if power == 2:
        return [Move(face), Move(face)]
    return [Move(face, prime=True)]


def _cubie_for_move(m: int) -> CubieState:
    base = MOVE_CUBIES[Move(FACE_ORDER[m // 3])]
    out = IDENTITY
    for _ in range(m % 3 + 1):
        out = out.multiply(base)
    return out


MOVE_CUBIE = tuple(_cubie_for_move(m) for m in range(N_MOVES))


def cubies_after(cubies: CubieState, maneuver: list[int]) -> CubieState:
    for m in maneuver:
        cubies = cubies.multiply(MOVE_CUBIE[m])
    return cubies


# ---------------------------------------------------------------- raw coords

def get_twist(c: CubieState) -> int:
    t = 0
    for i in range(7):
        t = 3 * t + c.corner_orient[i]
    return t


def set_twist(twist: int) -> CubieState:
    co = [0] * 8
    total = 0
    for i in range(6, -1, -1):
        co[i] = twist % 3
        total += co[i]
        twist //= 3
    co[7] = (-total) % 3
    return CubieState(IDENTITY.corner_perm, tuple(co), IDENTITY.edge_perm, IDENTITY.edge_orient)


def get_flip(c: CubieState) -> int:
    f = 0
    for i in range(11):
        f = 2 * f + c.edge_orient[i]
    return f


def set_flip(flip: int) -> CubieState:
    eo = [0] * 12
    total = 0
    for i in range(10, -1, -1):
        eo[i] = flip % 2
        total += eo[i]
        flip //= 2
    eo[11] = total % 2
    return CubieState(IDENTITY.corner_perm, IDENTITY.corner_orient, IDENTITY.edge_perm, tuple(eo))


def get_slice(c: CubieState) -> int:
    """Rank of the 4-subset of slots holding slice edges (FR,FL,BL,BR); 0 when home."""
    rank = 0
    k = 0
    for slot in range(12):
        if c.edge_perm[slot] >= 8:
            rank += comb(slot, k + 1)
            k += 1
    return 494 - rank


def set_slice(coord: int) -> CubieState:
    rank = 494 - coord
    slots = []
    for k in range(3, -1, -1):
        slot = 11
        while comb(slot, k + 1) > rank:
            slot -= 1
        slots.append(slot)
        rank -= comb(slot, k + 1)
    occupied = sorted(slots)
    ep = [-1] * 12
    pieces = iter((8, 9, 10, 11))
    for slot in occupied:
        ep[slot] = next(pieces)
    fill = iter(range(8))
    for slot in range(12):
        if ep[slot] == -1:
            ep[slot] = next(fill)
    return CubieState(IDENTITY.corner_perm, IDENTITY.corner_orient, tuple(ep), IDENTITY.edge_orient)


def _perm_rank(perm) -> int:
    n = len(perm)
    items = list(perm)
    rank = 0
    for i in range(n):
        smaller = sum(1 for j in range(i + 1, n) if items[j] < items[i])
        rank = rank * (n - i) + smaller
    return rank


def _perm_unrank(rank: int, n: int) -> list[int]:
    digits = []
    for base in range(1, n + 1):
        digits.append(rank % base)
        rank //= base
    digits.reverse()
    pool = list(range(n))
    out = []
    for d in digits:
        out.append(pool.pop(d))
    return out


def get_cperm(c: CubieState) -> int:
    return _perm_rank(c.corner_perm)


def set_cperm(rank: int) -> CubieState:
    cp = tuple(_perm_unrank(rank, 8))
    return CubieState(cp, IDENTITY.corner_orient, IDENTITY.edge_perm, IDENTITY.edge_orient)


def get_udep(c: CubieState) -> int:
    """Permutation of the eight U/D-layer edges; valid only inside H."""
    return _perm_rank(c.edge_perm[:8])


def set_udep(rank: int) -> CubieState:
    ep = tuple(_perm_unrank(rank, 8)) + (8, 9, 10, 11)
    return CubieState(IDENTITY.corner_perm, IDENTITY.corner_orient, ep, IDENTITY.edge_orient)


def get_sliceperm(c: CubieState) -> int:
    """Permutation of the four slice edges within the slice; valid only inside H."""
    return _perm_rank(tuple(p - 8 for p in c.edge_perm[8:]))


def set_sliceperm(rank: int) -> CubieState:
    ep = tuple(range(8)) + tuple(p + 8 for p in _perm_unrank(rank, 4))
    return CubieState(IDENTITY.corner_perm, IDENTITY.corner_orient, ep, IDENTITY.edge_orient)


def in_h(c: CubieState) -> bool:
    return get_twist(c) == 0 and get_flip(c) == 0 and get_slice(c) == 0


def build_move_table(size: int, getter, setter, moves=range(N_MOVES)) -> list[int]:
    """Flat table t[coord*18 + m] (unused move slots stay -1 for phase-2 coords)."""
    table = [-1] * (size * N_MOVES)
    for coord in range(size):
        base = setter(coord)
        for m in moves:
            table[coord * N_MOVES + m] = getter(base.multiply(MOVE_CUBIE[m]))
    return table
