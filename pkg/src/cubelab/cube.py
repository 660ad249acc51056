"""Sticker-level cube mechanics: the 54-facelet state and the 12 quarter-turn moves.

State layout ("Initial format"): the six faces are concatenated F, B, L, R, U, D,
nine stickers per face. Within a face, stickers are row-major as drawn on the
cross net

        U
      L F R
        D
        B

so U's bottom row touches F, D's top row touches F, and B (unfolded below D)
stores its D-adjacent row first. Face colors: F=R, B=G, L=B, R=Y, U=O, D=W.

The move tables below were derived once from a 3D cubelet model of that net and
are frozen as literals; the group-theoretic tests (order 4, commutation of
opposite faces, order(R*U)=105) guard against transcription errors.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

COLORS = "WRBOGY"
FACES = "FBLRUD"

# color of each face's center in the solved state, in face order F,B,L,R,U,D
FACE_COLORS = {"F": "R", "B": "G", "L": "B", "R": "Y", "U": "O", "D": "W"}
CENTER_INDEX = {"F": 4, "B": 13, "L": 22, "R": 31, "U": 40, "D": 49}

SOLVED_STICKERS = "R" * 9 + "G" * 9 + "B" * 9 + "Y" * 9 + "O" * 9 + "W" * 9

# Gather-form permutations: new[i] = old[PERM[i]], one per clockwise quarter turn.
_CW_PERMS = {
    "F": (6, 3, 0, 7, 4, 1, 8, 5, 2, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19,
          45, 21, 22, 46, 24, 25, 47, 42, 28, 29, 43, 31, 32, 44, 34, 35, 36, 37,
          38, 39, 40, 41, 26, 23, 20, 33, 30, 27, 48, 49, 50, 51, 52, 53),
    "B": (0, 1, 2, 3, 4, 5, 6, 7, 8, 15, 12, 9, 16, 13, 10, 17, 14, 11, 38, 19,
          20, 37, 22, 23, 36, 25, 26, 27, 28, 53, 30, 31, 52, 33, 34, 51, 29, 32,
          35, 39, 40, 41, 42, 43, 44, 45, 46, 47, 48, 49, 50, 18, 21, 24),
    "L": (36, 1, 2, 39, 4, 5, 42, 7, 8, 45, 10, 11, 48, 13, 14, 51, 16, 17, 24,
          21, 18, 25, 22, 19, 26, 23, 20, 27, 28, 29, 30, 31, 32, 33, 34, 35, 9,
          37, 38, 12, 40, 41, 15, 43, 44, 0, 46, 47, 3, 49, 50, 6, 52, 53),
    "R": (0, 1, 47, 3, 4, 50, 6, 7, 53, 9, 10, 38, 12, 13, 41, 15, 16, 44, 18,
          19, 20, 21, 22, 23, 24, 25, 26, 33, 30, 27, 34, 31, 28, 35, 32, 29, 36,
          37, 2, 39, 40, 5, 42, 43, 8, 45, 46, 11, 48, 49, 14, 51, 52, 17),
    "U": (27, 28, 29, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 20, 19, 18, 0, 1,
          2, 21, 22, 23, 24, 25, 26, 17, 16, 15, 30, 31, 32, 33, 34, 35, 42, 39,
          36, 43, 40, 37, 44, 41, 38, 45, 46, 47, 48, 49, 50, 51, 52, 53),
    "D": (0, 1, 2, 3, 4, 5, 24, 25, 26, 35, 34, 33, 12, 13, 14, 15, 16, 17, 18,
          19, 20, 21, 22, 23, 11, 10, 9, 27, 28, 29, 30, 31, 32, 6, 7, 8, 36, 37,
          38, 39, 40, 41, 42, 43, 44, 51, 48, 45, 52, 49, 46, 53, 50, 47),
}


def _invert_perm(perm: Sequence[int]) -> tuple[int, ...]:
    out = [0] * 54
    for i, j in enumerate(perm):
        out[j] = i
    return tuple(out)


class CubeError(Exception):
    """Base class for all cubelab errors."""


@dataclass(frozen=True, order=True)
class Move:
    """One of the 12 quarter-turn moves in Singmaster notation (face + optional prime)."""

    face: str
    prime: bool = False

    def __post_init__(self) -> None:
        if self.face not in FACES:
            raise ValueError(f"unknown face {self.face!r}")

    @staticmethod
    def parse(text: str) -> "Move":
        text = text.strip()
        if len(text) == 1 and text in FACES:
            return Move(text)
        if len(text) == 2 and text[0] in FACES and text[1] == "'":
            return Move(text[0], prime=True)
        raise ValueError(f"not a Singmaster quarter turn: {text!r}")

    def inverse(self) -> "Move":
        return Move(self.face, not self.prime)

    def __str__(self) -> str:
        return self.face + ("'" if self.prime else "")


MOVES = tuple(Move(f, p) for f in FACES for p in (False, True))

# new[i] = old[perm[i]] for every move, primes included
MOVE_PERMS: dict[Move, tuple[int, ...]] = {}
for _f, _perm in _CW_PERMS.items():
    MOVE_PERMS[Move(_f)] = tuple(_perm)
    MOVE_PERMS[Move(_f, prime=True)] = _invert_perm(_perm)


@dataclass(frozen=True)
class CubeState:
    """Immutable 54-sticker state. Compare/hash by value; never mutated in place."""

    stickers: str = SOLVED_STICKERS

    def __post_init__(self) -> None:
        if len(self.stickers) != 54:
            raise ValueError(f"expected 54 stickers, got {len(self.stickers)}")

    def apply(self, move: Move) -> "CubeState":
        perm = MOVE_PERMS[move]
        s = self.stickers
        return CubeState("".join(s[j] for j in perm))

    def apply_seq(self, seq: Iterable[Move]) -> "CubeState":
        state = self
        for move in seq:
            state = state.apply(move)
        return state

    def face(self, face: str) -> str:
        i = FACES.index(face) * 9
        return self.stickers[i:i + 9]

    def is_solved(self) -> bool:
        return self.stickers == SOLVED_STICKERS

    def __str__(self) -> str:
        return self.stickers


SOLVED = CubeState()


def apply_move(state: CubeState, move: Move) -> CubeState:
    return state.apply(move)


def is_solved(state: CubeState) -> bool:
    return state.is_solved()


def inverse(move: Move) -> Move:
    return move.inverse()


def invert_seq(seq: Sequence[Move]) -> list[Move]:
    return [m.inverse() for m in reversed(seq)]


def parse_moves(text: str | Iterable[str]) -> list[Move]:
    """Parse "U R' F" or an iterable of move strings into Moves."""
    if isinstance(text, str):
        text = text.split()
    return [Move.parse(t) for t in text]


def format_moves(seq: Iterable[Move]) -> str:
    return " ".join(str(m) for m in seq)


def scramble(seed: int, length: int, rng: random.Random | None = None) -> tuple[CubeState, list[Move]]:
    """Apply `length` pseudo-random moves from solved, reproducibly.

    Never plays the immediate inverse of the previous move (it would cancel).
    """
    if length < 0:
        raise ValueError("length must be >= 0")
    if rng is None:
        rng = random.Random(seed)
    seq: list[Move] = []
    state = SOLVED
    for _ in range(length):
        while True:
            move = MOVES[rng.randrange(12)]
            if seq and move == seq[-1].inverse():
                continue
            break
        seq.append(move)
        state = state.apply(move)
    return state, seq


def random_state(rng: random.Random, length: int = 30) -> CubeState:
    """A pseudo-random reachable state (long scramble)."""
    state, _ = scramble(0, length, rng=rng)
    return state


def iter_moves() -> Iterator[Move]:
    return iter(MOVES)
