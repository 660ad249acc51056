"""Progress metrics and the dense/sparse reward computations.

Three potential functions over states:
  sticker   -- stickers on their solved-state index (6..54)
  face      -- fully uniform faces (0..6)
  heuristic -- layer-by-layer stage count (0..7), see STAGES below

Dense reward for a transition is the difference of the chosen potential;
`no_reward` always yields 0.0. The sparse terminal reward is 1 exactly on the
solved state.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .cube import FACE_COLORS, SOLVED_STICKERS, CubeState
from .cubies import CORNER_FACELETS


class MetricKind(str, Enum):
    STICKER = "sticker"
    FACE = "face"
    HEURISTIC = "heuristic"
    NO_REWARD = "no_reward"


def phi_sticker(state: CubeState) -> int:
    return sum(1 for a, b in zip(state.stickers, SOLVED_STICKERS) if a == b)


def phi_face(state: CubeState) -> int:
    s = state.stickers
    return sum(1 for f in range(6) if s[9 * f:9 * f + 9] == s[9 * f + 4] * 9)


# Cumulative layer-by-layer stages, bottom (white) first. Each entry is a set of
# (index, color) constraints; stage k of the report holds iff all constraints of
# stages 1..k hold. Index comments use the net layout documented in cube.py.
_W, _R, _B, _Y, _G, _O = (FACE_COLORS[f] for f in "DFLRBU")

_BOTTOM_CROSS = ((46, _W), (7, _R), (50, _W), (34, _Y), (52, _W), (10, _G), (48, _W), (25, _B))
_BOTTOM_CORNERS = tuple((i, _W) for i in (45, 47, 51, 53)) + (
    (6, _R), (8, _R), (33, _Y), (35, _Y), (9, _G), (11, _G), (24, _B), (26, _B))
_SECOND_LAYER = ((3, _R), (5, _R), (30, _Y), (32, _Y), (12, _G), (14, _G), (21, _B), (23, _B))
_TOP_CROSS = tuple((i, _O) for i in (37, 39, 41, 43))
_TOP_EDGES_PERMUTED = ((1, _R), (28, _Y), (16, _G), (19, _B))

# U-layer corner slots: facelet triples plus the color set each must carry
_TOP_CORNER_SLOTS = tuple(
    (CORNER_FACELETS[i], frozenset(SOLVED_STICKERS[f] for f in CORNER_FACELETS[i]))
    for i in range(4))


def _stage_flags(state: CubeState) -> tuple[bool, ...]:
    s = state.stickers

    def ok(constraints):
        return all(s[i] == c for i, c in constraints)

    positioned = all(frozenset(s[f] for f in tri) == colors
                     for tri, colors in _TOP_CORNER_SLOTS)
    return (
        ok(_BOTTOM_CROSS),
        ok(_BOTTOM_CORNERS),
        ok(_SECOND_LAYER),
        ok(_TOP_CROSS),
        ok(_TOP_EDGES_PERMUTED),
        positioned,
        state.is_solved(),
    )


@dataclass(frozen=True)
class StageReport:
    """Layer-by-layer progress: flags for the seven stages plus the cumulative count."""

    per_stage_flags: tuple[bool, ...]
    completed_stage: int

    @staticmethod
    def of(state: CubeState) -> "StageReport":
        flags = _stage_flags(state)
        completed = 0
        for flag in flags:
            if not flag:
                break
            completed += 1
        return StageReport(flags, completed)


def phi_heuristic(state: CubeState) -> StageReport:
    return StageReport.of(state)


_PHI = {
    MetricKind.STICKER: phi_sticker,
    MetricKind.FACE: phi_face,
    MetricKind.HEURISTIC: lambda s: StageReport.of(s).completed_stage,
}


def phi_value(state: CubeState, kind: MetricKind) -> int:
    if kind == MetricKind.NO_REWARD:
        return 0
    return _PHI[kind](state)


def dense_reward(prev: CubeState, nxt: CubeState, kind: MetricKind) -> float:
    if kind == MetricKind.NO_REWARD:
        return 0.0
    return float(phi_value(nxt, kind) - phi_value(prev, kind))


def terminal_reward(state: CubeState) -> int:
    return 1 if state.is_solved() else 0
