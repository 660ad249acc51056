"""The two 54-character facelet string formats and the conversion between them.

Initial format (environment): colors W/R/B/O/G/Y concatenated F,B,L,R,U,D --
identical to CubeState's internal layout, so encoding is the identity.

Solver format: face letters U/R/F/D/L/B concatenated U,R,F,D,L,B with each face
read row-major as in the solver's own net (U on top, L-F-R-B strip, D below).
Because the environment's net unfolds B below D while the solver views B from
behind with U up, the B block is index-reversed in the conversion; every other
face maps through unchanged. The color-to-letter relabeling follows the centers
(O->U, Y->R, R->F, W->D, B->L, G->B).

validate_solver reproduces the solver's error strings verbatim; the count and
undefined-edge messages are byte-pinned by observed tool output, the remaining
messages keep the same phrasing style.
"""

from __future__ import annotations

from .cube import CENTER_INDEX, COLORS, FACE_COLORS, CubeError, CubeState
from .cubies import (DuplicatePiece, InvalidStateError, OrientationParityViolation,
                     UndefinedCorner, UndefinedEdge, decompose_cubies, perm_parity)

SOLVER_FACES = "URFDLB"

# color letter -> solver face letter, via the solved centers
COLOR_TO_FACE = {FACE_COLORS[f]: f for f in SOLVER_FACES}
FACE_TO_COLOR = {f: c for c, f in COLOR_TO_FACE.items()}

# initial-format index feeding each solver-format position (B block reversed)
TO_SOLVER_INDEX = (
    tuple(range(36, 45)) + tuple(range(27, 36)) + tuple(range(0, 9))
    + tuple(range(45, 54)) + tuple(range(18, 27)) + tuple(range(17, 8, -1))
)
FROM_SOLVER_INDEX = tuple(TO_SOLVER_INDEX.index(i) for i in range(54))

SOLVED_INITIAL = "R" * 9 + "G" * 9 + "B" * 9 + "Y" * 9 + "O" * 9 + "W" * 9
SOLVED_SOLVER = "U" * 9 + "R" * 9 + "F" * 9 + "D" * 9 + "L" * 9 + "B" * 9


class DecodeError(CubeError):
    """A 54-character string failed validation; `kind` names the failing check."""

    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind


def encode_initial(state: CubeState) -> str:
    return state.stickers


def decode_initial(text: str) -> CubeState:
    """Parse an Initial-format string, rejecting anything unreachable."""
    if len(text) != 54:
        raise DecodeError("BadLength", f"expected 54 characters, got {len(text)}")
    bad = set(text) - set(COLORS)
    if bad:
        raise DecodeError("BadAlphabet", f"invalid color letters: {''.join(sorted(bad))}")
    for color in COLORS:
        if text.count(color) != 9:
            raise DecodeError("BadColorCount",
                              f"expected 9 of each color, got {text.count(color)} x {color}")
    for face, idx in CENTER_INDEX.items():
        if text[idx] != FACE_COLORS[face]:
            raise DecodeError("BadCenters",
                              f"center of {face} must be {FACE_COLORS[face]}, got {text[idx]}")
    state = CubeState(text)
    try:
        decompose_cubies(state)
    except InvalidStateError as exc:
        raise DecodeError("Unreachable", str(exc)) from exc
    return state


def initial_error_string(text: str) -> str | None:
    """Tool-facing validation of an Initial-format string.

    None when valid; otherwise an "Error: ..." message in the same phrasing
    style as validate_solver (shared wording wherever the check coincides).
    """
    if len(text) < 54:
        return f"Error: Cube definition string {text} contains less than 54 facelets."
    if len(text) > 54:
        return f"Error: Cube definition string {text} contains more than 54 facelets."
    if any(text.count(c) != 9 for c in COLORS):
        return (f"Error: Cube definition string {text} does not contain exactly "
                "9 facelets of each color.")
    for face, idx in CENTER_INDEX.items():
        if text[idx] != FACE_COLORS[face]:
            return f"Error: Cube definition string {text} has wrong center facelets."
    try:
        decompose_cubies(CubeState(text))
    except UndefinedEdge:
        return "Error: Some edges are undefined."
    except UndefinedCorner:
        return "Error: Some corners are undefined."
    except DuplicatePiece as exc:
        return f"Error: {exc}."
    except OrientationParityViolation as exc:
        if "edge" in str(exc):
            return "Error: Total edge flip is wrong."
        return "Error: Total corner twist is wrong."
    except InvalidStateError:
        return "Error: Wrong edge and corner parity."
    return None


def to_solver_format(state: CubeState) -> str:
    s = state.stickers
    return "".join(COLOR_TO_FACE[s[i]] for i in TO_SOLVER_INDEX)


def from_solver_format(text: str) -> CubeState:
    """Inverse of to_solver_format; input must pass validate_solver."""
    err = validate_solver(text)
    if err is not None:
        raise DecodeError("BadSolverString", err)
    stickers = [""] * 54
    for pos, i in enumerate(TO_SOLVER_INDEX):
        stickers[i] = FACE_TO_COLOR[text[pos]]
    return CubeState("".join(stickers))


# Solver-format facelet positions of each corner/edge slot (same slot order as
# cubies.py). Triples are clockwise starting from the U/D facelet; pairs put
# the U/D (or F/B, for slice edges) facelet first.
_C = {f: 9 * SOLVER_FACES.index(f) for f in SOLVER_FACES}
SOLVER_CORNER_FACELETS = (
    (_C["U"] + 8, _C["R"] + 0, _C["F"] + 2), (_C["U"] + 6, _C["F"] + 0, _C["L"] + 2),
    (_C["U"] + 0, _C["L"] + 0, _C["B"] + 2), (_C["U"] + 2, _C["B"] + 0, _C["R"] + 2),
    (_C["D"] + 2, _C["F"] + 8, _C["R"] + 6), (_C["D"] + 0, _C["L"] + 8, _C["F"] + 6),
    (_C["D"] + 6, _C["B"] + 8, _C["L"] + 6), (_C["D"] + 8, _C["R"] + 8, _C["B"] + 6),
)
SOLVER_EDGE_FACELETS = (
    (_C["U"] + 5, _C["R"] + 1), (_C["U"] + 7, _C["F"] + 1), (_C["U"] + 3, _C["L"] + 1),
    (_C["U"] + 1, _C["B"] + 1), (_C["D"] + 5, _C["R"] + 7), (_C["D"] + 1, _C["F"] + 7),
    (_C["D"] + 3, _C["L"] + 7), (_C["D"] + 7, _C["B"] + 7), (_C["F"] + 5, _C["R"] + 3),
    (_C["F"] + 3, _C["L"] + 5), (_C["B"] + 5, _C["L"] + 3), (_C["B"] + 3, _C["R"] + 5),
)
SOLVER_CORNER_LETTERS = ("URF", "UFL", "ULB", "UBR", "DFR", "DLF", "DBL", "DRB")
SOLVER_EDGE_LETTERS = ("UR", "UF", "UL", "UB", "DR", "DF", "DL", "DB", "FR", "FL", "BL", "BR")


def solver_string_to_cubies(text: str) -> tuple[list[int], list[int], list[int], list[int]] | str:
    """Extract (cp, co, ep, eo) from a solver-format string, or an error string.

    Piece extraction failures are reported lazily (as -1 entries) so the caller
    can phrase the verification errors in the solver's canonical order.
    """
    cp, co = [-1] * 8, [0] * 8
    for slot, tri in enumerate(SOLVER_CORNER_FACELETS):
        letters = tuple(text[f] for f in tri)
        ori = next((o for o in range(3) if letters[o] in ("U", "D")), None)
        if ori is None:
            continue
        rotated = "".join(letters[ori:] + letters[:ori])
        if rotated in SOLVER_CORNER_LETTERS:
            piece = SOLVER_CORNER_LETTERS.index(rotated)
            if piece not in cp:
                cp[slot] = piece
                co[slot] = ori
    ep, eo = [-1] * 12, [0] * 12
    for slot, pair_idx in enumerate(SOLVER_EDGE_FACELETS):
        pair = text[pair_idx[0]] + text[pair_idx[1]]
        if pair in SOLVER_EDGE_LETTERS:
            piece, ori = SOLVER_EDGE_LETTERS.index(pair), 0
        elif pair[::-1] in SOLVER_EDGE_LETTERS:
            piece, ori = SOLVER_EDGE_LETTERS.index(pair[::-1]), 1
        else:
            continue
        if piece not in ep:
            ep[slot] = piece
            eo[slot] = ori
    return cp, co, ep, eo


def validate_solver(text: str) -> str | None:
    """Return None when `text` is a well-formed, reachable cube definition.

    Otherwise return the error string exactly as the planning tool emits it.
    """
    if len(text) < 54:
        return f"Error: Cube definition string {text} contains less than 54 facelets."
    if len(text) > 54:
        return f"Error: Cube definition string {text} contains more than 54 facelets."
    if any(text.count(f) != 9 for f in SOLVER_FACES):
        return (f"Error: Cube definition string {text} does not contain exactly "
                "9 facelets of each color.")
    cp, co, ep, eo = solver_string_to_cubies(text)
    if -1 in ep:
        return "Error: Some edges are undefined."
    if sum(eo) % 2:
        return "Error: Total edge flip is wrong."
    if -1 in cp:
        return "Error: Some corners are undefined."
    if sum(co) % 3:
        return "Error: Total corner twist is wrong."
    if perm_parity(cp) != perm_parity(ep):
        return "Error: Wrong edge and corner parity."
    return None
