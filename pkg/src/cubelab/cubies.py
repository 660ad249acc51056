"""Corner/edge (cubie) decomposition of a sticker state.

Slots follow the usual two-phase ordering:
  corners: URF UFL ULB UBR DFR DLF DBL DRB
  edges:   UR UF UL UB DR DF DL DB FR FL BL BR

A corner's facelets are listed clockwise starting from its U/D sticker; an
edge's facelets put the U/D sticker first (F/B sticker for the four slice
edges). Corner orientation counts how far the U/D color is twisted from that
reference; edge orientation is 0/1 for good/flipped.

Decomposition doubles as the reachability check: a 54-sticker assignment is a
real cube state iff every sticker group names an actual piece, every piece
occurs once, twists sum to 0 mod 3, flips to 0 mod 2, and corner/edge
permutation parities agree.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .cube import FACE_COLORS, MOVES, SOLVED, CubeError, CubeState, Move

CORNER_NAMES = ("URF", "UFL", "ULB", "UBR", "DFR", "DLF", "DBL", "DRB")
EDGE_NAMES = ("UR", "UF", "UL", "UB", "DR", "DF", "DL", "DB", "FR", "FL", "BL", "BR")

# facelet indices (Initial format) per slot, derived from the net geometry
CORNER_FACELETS = ((44, 27, 2), (42, 0, 20), (36, 18, 15), (38, 17, 29),
                   (47, 8, 33), (45, 26, 6), (51, 9, 24), (53, 35, 11))
EDGE_FACELETS = ((41, 28), (43, 1), (39, 19), (37, 16), (50, 34), (46, 7),
                 (48, 25), (52, 10), (5, 30), (3, 23), (12, 21), (14, 32))

# sticker colors of each piece in the solved state, in the same facelet order
CORNER_COLORS = ("OYR", "ORB", "OBG", "OGY", "WRY", "WBR", "WGB", "WYG")
EDGE_COLORS = ("OY", "OR", "OB", "OG", "WY", "WR", "WB", "WG", "RY", "RB", "GB", "GY")

_UD_COLORS = frozenset((FACE_COLORS["U"], FACE_COLORS["D"]))


class InvalidStateError(CubeError):
    """The sticker assignment is not a reachable cube state."""


class UndefinedCorner(InvalidStateError):
    pass


class UndefinedEdge(InvalidStateError):
    pass


class DuplicatePiece(InvalidStateError):
    pass


class OrientationParityViolation(InvalidStateError):
    pass


class PermutationParityViolation(InvalidStateError):
    pass


def perm_parity(perm: Sequence[int]) -> int:
    """0 for even permutations, 1 for odd."""
    seen = [False] * len(perm)
    parity = 0
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        parity ^= (length - 1) & 1
    return parity


@dataclass(frozen=True)
class CubieState:
    corner_perm: tuple[int, ...]
    corner_orient: tuple[int, ...]
    edge_perm: tuple[int, ...]
    edge_orient: tuple[int, ...]

    def multiply(self, other: "CubieState") -> "CubieState":
        """Group product: `self` followed by `other` (other applied to self)."""
        cp = tuple(self.corner_perm[other.corner_perm[i]] for i in range(8))
        co = tuple((self.corner_orient[other.corner_perm[i]] + other.corner_orient[i]) % 3
                   for i in range(8))
        ep = tuple(self.edge_perm[other.edge_perm[i]] for i in range(12))
        eo = tuple((self.edge_orient[other.edge_perm[i]] + other.edge_orient[i]) % 2
                   for i in range(12))
        return CubieState(cp, co, ep, eo)

    def inverse(self) -> "CubieState":
        cp = [0] * 8
        co = [0] * 8
        for i in range(8):
            cp[self.corner_perm[i]] = i
        for i in range(8):
            co[i] = (-self.corner_orient[cp[i]]) % 3
        ep = [0] * 12
        eo = [0] * 12
        for i in range(12):
            ep[self.edge_perm[i]] = i
        for i in range(12):
            eo[i] = self.edge_orient[ep[i]] % 2
        return CubieState(tuple(cp), tuple(co), tuple(ep), tuple(eo))

    def is_identity(self) -> bool:
        return (self.corner_perm == tuple(range(8)) and self.edge_perm == tuple(range(12))
                and not any(self.corner_orient) and not any(self.edge_orient))


IDENTITY = CubieState(tuple(range(8)), (0,) * 8, tuple(range(12)), (0,) * 12)


def decompose_cubies(state: CubeState) -> CubieState:
    """Decompose stickers into cubies, rejecting unreachable assignments."""
    s = state.stickers
    cp = [-1] * 8
    co = [0] * 8
    for slot, facelets in enumerate(CORNER_FACELETS):
        tri = tuple(s[f] for f in facelets)
        ori = next((o for o in range(3) if tri[o] in _UD_COLORS), None)
        if ori is None:
            raise UndefinedCorner(f"corner at {CORNER_NAMES[slot]} has no U/D sticker: {''.join(tri)}")
        rotated = tri[ori:] + tri[:ori]
        try:
            piece = CORNER_COLORS.index("".join(rotated))
        except ValueError:
            raise UndefinedCorner(
                f"stickers {''.join(tri)} at {CORNER_NAMES[slot]} name no corner piece") from None
        if piece in cp:
            raise DuplicatePiece(f"corner {CORNER_NAMES[piece]} appears more than once")
        cp[slot] = piece
        co[slot] = ori

    ep = [-1] * 12
    eo = [0] * 12
    for slot, facelets in enumerate(EDGE_FACELETS):
        pair = s[facelets[0]] + s[facelets[1]]
        if pair in EDGE_COLORS:
            piece, ori = EDGE_COLORS.index(pair), 0
        elif pair[::-1] in EDGE_COLORS:
            piece, ori = EDGE_COLORS.index(pair[::-1]), 1
        else:
            raise UndefinedEdge(f"stickers {pair} at {EDGE_NAMES[slot]} name no edge piece")
        if piece in ep:
            raise DuplicatePiece(f"edge {EDGE_NAMES[piece]} appears more than once")
        ep[slot] = piece
        eo[slot] = ori

    if sum(co) % 3:
        raise OrientationParityViolation("corner twists do not sum to 0 mod 3")
    if sum(eo) % 2:
        raise OrientationParityViolation("edge flips do not sum to 0 mod 2")
    if perm_parity(cp) != perm_parity(ep):
        raise PermutationParityViolation("corner and edge permutation parities differ")
    return CubieState(tuple(cp), tuple(co), tuple(ep), tuple(eo))


def compose_stickers(cubies: CubieState) -> CubeState:
    """Inverse of decompose_cubies (valid CubieState -> sticker state)."""
    out = list(SOLVED.stickers)
    for slot in range(8):
        piece = cubies.corner_perm[slot]
        ori = cubies.corner_orient[slot]
        colors = CORNER_COLORS[piece]
        for k in range(3):
            out[CORNER_FACELETS[slot][(k + ori) % 3]] = colors[k]
    for slot in range(12):
        piece = cubies.edge_perm[slot]
        ori = cubies.edge_orient[slot]
        colors = EDGE_COLORS[piece]
        for k in range(2):
            out[EDGE_FACELETS[slot][(k + ori) % 2]] = colors[k]
    return CubeState("".join(out))


def is_reachable(state: CubeState) -> bool:
    try:
        decompose_cubies(state)
        return True
    except InvalidStateError:
        return False


# Cubie action of each of the 12 quarter turns, derived from the sticker tables.
MOVE_CUBIES: dict[Move, CubieState] = {m: decompose_cubies(SOLVED.apply(m)) for m in MOVES}
