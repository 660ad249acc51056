"""Exhaustive breadth-first enumeration near the solved state.

Serves as the independent oracle for the optimal solver (exact HTM depth of
every state within reach) and as a sampler of exact-depth states for training
and task generation. HTM: a half turn counts as one move, so each level
expands by 18 face turns; the BFS dedupes globally and is therefore exact.
"""

from __future__ import annotations

from .cube import MOVE_PERMS, SOLVED_STICKERS, CubeState, Move
from .twophase.coords import move_to_quarter_turns

# the 18 HTM face turns as quarter-turn sequences, in URFDLB x {1,2,3} order
HTM_MOVES: list[list[Move]] = [move_to_quarter_turns(m) for m in range(18)]


def _compose(seq: list[Move]) -> tuple[int, ...]:
    perm = list(range(54))
    for move in seq:
        table = MOVE_PERMS[move]
        perm = [perm[table[i]] for i in range(54)]
    return tuple(perm)


# single 54-index gather per HTM move (half turns pre-composed)
HTM_PERMS: list[tuple[int, ...]] = [_compose(seq) for seq in HTM_MOVES]


def apply_htm(stickers: str, m: int) -> str:
    perm = HTM_PERMS[m]
    return "".join(stickers[perm[i]] for i in range(54))


def bfs_depths(max_depth: int, start: str = SOLVED_STICKERS) -> dict[str, int]:
    """Exact HTM depth-from-`start` of every state within max_depth, keyed by
    sticker string.

    Sizes grow roughly 13x per level (18, 243, 3240, 43254, ...); max_depth 5
    is ~0.6M states and the practical ceiling for this oracle.
    """
    depths: dict[str, int] = {start: 0}
    frontier = [start]
    for d in range(1, max_depth + 1):
        nxt: list[str] = []
        for stickers in frontier:
            for m in range(18):
                child = apply_htm(stickers, m)
                if child not in depths:
                    depths[child] = d
                    nxt.append(child)
        frontier = nxt
    return depths


def states_at_depth(max_depth: int) -> dict[int, list[str]]:
    """The same enumeration bucketed by exact depth."""
    buckets: dict[int, list[str]] = {d: [] for d in range(max_depth + 1)}
    for stickers, d in bfs_depths(max_depth).items():
        buckets[d].append(stickers)
    return buckets


def meet_in_middle_depth(state: CubeState, solved_depths: dict[str, int],
                         forward: int) -> int | None:
    """Exact HTM depth via bidirectional meeting, independent of any heuristic.

    Valid for depths up to forward + max(solved_depths); None when the state
    lies beyond that horizon.
    """
    table_reach = max(solved_depths.values())
    best = None
    seen = {state.stickers}
    frontier = [state.stickers]
    for g in range(forward + 1):
        for stickers in frontier:
            d = solved_depths.get(stickers)
            if d is not None and (best is None or g + d < best):
                best = g + d
        if g == forward or (best is not None and g + 1 >= best):
            break
        nxt = []
        for stickers in frontier:
            for m in range(18):
                child = apply_htm(stickers, m)
                if child not in seen:
                    seen.add(child)
                    nxt.append(child)
        frontier = nxt
    if best is not None and best <= forward + table_reach:
        return best
    return None
