"""Observation functions: symbolic string, unfolded-map image, partial views.

Tiers:
  full_symbolic -- the 54-character Initial-format string
  full_visual   -- one image of the unfolded cross net (all 54 stickers)
  face_view     -- one 3x3 face as seen from the current viewpoint
  vertex_view   -- an 84x84 corner-perspective image of three adjacent faces

Rendering is flat-filled on a (50,50,50) background with pure-black separators
and the fixed palette below, so `parse_rendered` recovers every visible sticker
exactly; that round trip is the renderer's regression oracle.

Viewpoints are independent of the cube state. The face viewpoint is a camera
axis plus an in-plane orientation; the vertex viewpoint is one of the eight
corners (an upper and a lower ring of four). view_left/right and view_up/down
are mutual inverses, and the transition graphs are connected (any face within
4 steps, any vertex within 3).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .codecs import encode_initial
from .cube import FACES, CubeError, CubeState

PALETTE = {
    "R": (255, 0, 0),
    "G": (0, 255, 0),
    "B": (0, 0, 255),
    "Y": (255, 255, 0),
    "O": (255, 165, 0),
    "W": (255, 255, 255),
}
BACKGROUND = (50, 50, 50)
GRID = (0, 0, 0)

VERTEX_SIZE = 84
FACE_VIEW_SIZE = 96
FULL_VISUAL_SIZE = (384, 288)   # width, height


class Tier(str, Enum):
    FULL_SYMBOLIC = "full_symbolic"
    FULL_VISUAL = "full_visual"
    FACE_VIEW = "face_view"
    VERTEX_VIEW = "vertex_view"


VISUAL_TIERS = (Tier.FULL_VISUAL, Tier.FACE_VIEW, Tier.VERTEX_VIEW)
PARTIAL_TIERS = (Tier.FACE_VIEW, Tier.VERTEX_VIEW)

DIRECTIONS = ("view_up", "view_down", "view_left", "view_right")


class WrongTier(CubeError):
    pass


class ViewpointMismatch(CubeError):
    pass


class UnclassifiablePixel(CubeError):
    pass


# ---------------------------------------------------------------- geometry

_FACE_AXIS = {
    "F": np.array((0, 0, 1)), "B": np.array((0, 0, -1)),
    "L": np.array((-1, 0, 0)), "R": np.array((1, 0, 0)),
    "U": np.array((0, 1, 0)), "D": np.array((0, -1, 0)),
}
_AXIS_TO_FACE = {tuple(v): f for f, v in _FACE_AXIS.items()}

# world directions along which each face's storage rows/columns advance
# (matches the cross-net layout documented in cube.py)
_FACE_FRAME = {
    "F": (np.array((0, -1, 0)), np.array((1, 0, 0))),
    "B": (np.array((0, 1, 0)), np.array((1, 0, 0))),
    "L": (np.array((0, -1, 0)), np.array((0, 0, 1))),
    "R": (np.array((0, -1, 0)), np.array((0, 0, -1))),
    "U": (np.array((0, 0, 1)), np.array((1, 0, 0))),
    "D": (np.array((0, 0, -1)), np.array((1, 0, 0))),
}


def _face_cell_index(face: str, row_dir: np.ndarray, col_dir: np.ndarray,
                     r: int, c: int) -> int:
    """Storage index (0..8) of the sticker at scan cell (r, c) when the face is
    walked along world directions row_dir/col_dir (both in the face plane)."""
    base_row, base_col = _FACE_FRAME[face]
    pos = row_dir * (r - 1) + col_dir * (c - 1)
    a = int(pos @ base_row)
    b = int(pos @ base_col)
    return 3 * (a + 1) + (b + 1)


def _scan_face(state: CubeState, face: str, row_dir: np.ndarray,
               col_dir: np.ndarray) -> list[str]:
    base = FACES.index(face) * 9
    return [state.stickers[base + _face_cell_index(face, row_dir, col_dir, r, c)]
            for r in range(3) for c in range(3)]


# ---------------------------------------------------------------- viewpoints

# vertex rings in view_right order; ring position k increases to the left
# turn of the camera. Names reuse the cubie corner labels.
_UPPER_RING = ("URF", "UBR", "ULB", "UFL")
_LOWER_RING = ("DFR", "DRB", "DBL", "DLF")
VERTEX_NAMES = _UPPER_RING + _LOWER_RING


@dataclass(frozen=True)
class Viewpoint:
    """Camera description: `face`+`orientation` for face_view, `vertex`+`roll`
    for vertex_view, all None/0 on the full tiers."""

    face: str | None = None
    orientation: int = 0      # in-plane quarter turns of the camera
    vertex: str | None = None
    roll: int = 0             # reserved; transitions keep it at 0

    @staticmethod
    def for_tier(tier: Tier) -> "Viewpoint":
        if tier == Tier.FACE_VIEW:
            return Viewpoint(face="F", orientation=0)
        if tier == Tier.VERTEX_VIEW:
            return Viewpoint(vertex="URF", roll=0)
        return Viewpoint()

    def check(self, tier: Tier) -> None:
        if tier == Tier.FACE_VIEW and (self.face is None or self.face not in FACES):
            raise ViewpointMismatch("face_view requires a face viewpoint")
        if tier == Tier.VERTEX_VIEW and self.vertex not in VERTEX_NAMES:
            raise ViewpointMismatch("vertex_view requires a vertex viewpoint")

    def describe(self) -> str:
        if self.face is not None:
            return f"face {self.face} (orientation {self.orientation * 90} deg)"
        if self.vertex is not None:
            return f"vertex {self.vertex}"
        return "full view"


def _face_camera(face: str, orientation: int) -> tuple[np.ndarray, np.ndarray]:
    """(view-up, view-right) world vectors of the camera looking at `face`."""
    normal = _FACE_AXIS[face]
    if face in ("U", "D"):
        up = np.array((0, 0, -1)) if face == "U" else np.array((0, 0, 1))
    else:
        up = np.array((0, 1, 0))
    right = np.cross(up, normal)
    for _ in range(orientation % 4):
        up, right = -right, up
    return up, right


def _face_from_camera(up: np.ndarray, right: np.ndarray, normal: np.ndarray) -> Viewpoint:
    face = _AXIS_TO_FACE[tuple(int(x) for x in normal)]
    u, r = _face_camera(face, 0)
    for k in range(4):
        if np.array_equal(u, up) and np.array_equal(r, right):
            return Viewpoint(face=face, orientation=k)
        u, r = -r, u
    raise AssertionError("camera frame does not snap to a face orientation")


def _transform_face(vp: Viewpoint, direction: str) -> Viewpoint:
    up, right = _face_camera(vp.face, vp.orientation)
    normal = _FACE_AXIS[vp.face]
    if direction == "view_right":
        normal, right = right, -normal
    elif direction == "view_left":
        normal, right = -right, normal
    elif direction == "view_up":
        normal, up = up, -normal
    else:
        normal, up = -up, normal
    return _face_from_camera(up, right, normal)


def _transform_vertex(vp: Viewpoint, direction: str) -> Viewpoint:
    ring = _UPPER_RING if vp.vertex in _UPPER_RING else _LOWER_RING
    other = _LOWER_RING if ring is _UPPER_RING else _UPPER_RING
    k = ring.index(vp.vertex)
    if direction == "view_right":
        return replace(vp, vertex=ring[(k + 1) % 4])
    if direction == "view_left":
        return replace(vp, vertex=ring[(k - 1) % 4])
    # vertical moves swap rings; continuing over the top (or under the bottom)
    # lands on the far side, which makes view_up and view_down mutual inverses
    if direction == "view_up":
        return replace(vp, vertex=other[k] if ring is _LOWER_RING else other[(k + 2) % 4])
    return replace(vp, vertex=other[k] if ring is _UPPER_RING else other[(k + 2) % 4])


def apply_view_transformation(viewpoint: Viewpoint, direction: str, tier: Tier) -> Viewpoint:
    """Move the camera one step; the cube state is never involved."""
    if tier not in PARTIAL_TIERS:
        raise WrongTier(f"view transformations require a partial tier, not {tier.value}")
    if direction not in DIRECTIONS:
        raise ValueError(f"unknown direction {direction!r}")
    viewpoint.check(tier)
    if tier == Tier.FACE_VIEW:
        return _transform_face(viewpoint, direction)
    return _transform_vertex(viewpoint, direction)


# ---------------------------------------------------------------- rendering

@dataclass(frozen=True)
class RenderedImage:
    """RGB pixel grid; `pixels` is a (height, width, 3) uint8 array."""

    pixels: np.ndarray

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def to_png_bytes(self) -> bytes:
        from io import BytesIO

        from PIL import Image

        buf = BytesIO()
        Image.fromarray(self.pixels, "RGB").save(buf, format="PNG")
        return buf.getvalue()

    @staticmethod
    def from_png_bytes(data: bytes) -> "RenderedImage":
        from io import BytesIO

        from PIL import Image

        arr = np.asarray(Image.open(BytesIO(data)).convert("RGB"), dtype=np.uint8)
        return RenderedImage(arr)


# face blocks on the cross net: (net column, net row); B sits right of R
_NET_SLOTS = {"U": (1, 0), "L": (0, 1), "F": (1, 1), "R": (2, 1), "B": (3, 1), "D": (1, 2)}
_CELL = 28                                  # sticker square, pixels
_BLOCK = 3 * _CELL + 4                      # 1px grid lines at edges and between
_NET_PITCH = 96


def _paint_block(px: np.ndarray, x0: int, y0: int, cells: list[str]) -> None:
    px[y0:y0 + _BLOCK, x0:x0 + _BLOCK] = GRID
    for r in range(3):
        for c in range(3):
            x = x0 + 1 + c * (_CELL + 1)
            y = y0 + 1 + r * (_CELL + 1)
            px[y:y + _CELL, x:x + _CELL] = PALETTE[cells[3 * r + c]]


def _block_centers(x0: int, y0: int) -> list[tuple[int, int]]:
    return [(x0 + 1 + c * (_CELL + 1) + _CELL // 2, y0 + 1 + r * (_CELL + 1) + _CELL // 2)
            for r in range(3) for c in range(3)]


def render_full_visual(state: CubeState) -> RenderedImage:
    w, h = FULL_VISUAL_SIZE
    px = np.empty((h, w, 3), dtype=np.uint8)
    px[:] = BACKGROUND
    for face, (col, row) in _NET_SLOTS.items():
        base = FACES.index(face) * 9
        cells = list(state.stickers[base:base + 9])
        _paint_block(px, col * _NET_PITCH + 4, row * _NET_PITCH + 4, cells)
    return RenderedImage(px)


def _face_view_cells(state: CubeState, vp: Viewpoint) -> list[str]:
    up, right = _face_camera(vp.face, vp.orientation)
    return _scan_face(state, vp.face, -up, right)


def render_face_view(state: CubeState, viewpoint: Viewpoint) -> RenderedImage:
    px = np.empty((FACE_VIEW_SIZE, FACE_VIEW_SIZE, 3), dtype=np.uint8)
    px[:] = BACKGROUND
    _paint_block(px, 4, 4, _face_view_cells(state, viewpoint))
    return RenderedImage(px)


# vertex-view geometry: three sheared 3x3 panels tiling the 84x84 canvas.
# p(r, c) maps grid corners to pixels; sticker (r, c) is the quad spanned by
# p(r,c), p(r,c+1), p(r+1,c+1), p(r+1,c).
_PANELS = {
    "top": lambda r, c: (42 + (c - r) * 14, (c + r) * 7),
    "left": lambda r, c: (c * 14, 21 + c * 7 + r * 14),
    "right": lambda r, c: (42 + c * 14, 42 - c * 7 + r * 14),
}
_PANEL_ORDER = ("top", "left", "right")


def _vertex_panel_faces(vertex: str) -> dict[str, tuple[str, np.ndarray, np.ndarray]]:
    """Per panel: (visible face, row direction, column direction) in world space.

    Corner names list their faces clockwise from outside, which puts the second
    letter on the viewer's right for upper corners and on the left for lower
    ones. The U/D face always occupies the diamond panel; its rows advance
    toward the left panel's face and its columns toward the right panel's.
    """
    y_face = vertex[0]
    if y_face == "U":
        right_face, left_face = vertex[1], vertex[2]
    else:
        left_face, right_face = vertex[1], vertex[2]
    up_axis = _FACE_AXIS[y_face]
    return {
        "top": (y_face, _FACE_AXIS[left_face], _FACE_AXIS[right_face]),
        "left": (left_face, -up_axis, _FACE_AXIS[right_face]),
        "right": (right_face, -up_axis, -_FACE_AXIS[left_face]),
    }


def _point_in_poly(x: float, y: float, poly) -> bool:
    inside = False
    n = len(poly)
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        if (y0 > y) != (y1 > y):
            t = (y - y0) / (y1 - y0)
            if x < x0 + t * (x1 - x0):
                inside = not inside
    return inside


def _fill_quad(px: np.ndarray, quad, color) -> None:
    xs = [p[0] for p in quad]
    ys = [p[1] for p in quad]
    for y in range(max(min(ys), 0), min(max(ys) + 1, px.shape[0])):
        for x in range(max(min(xs), 0), min(max(xs) + 1, px.shape[1])):
            if _point_in_poly(x + 0.5, y + 0.5, quad):
                px[y, x] = color


def _draw_line(px: np.ndarray, p0, p1) -> None:
    steps = max(abs(p1[0] - p0[0]), abs(p1[1] - p0[1]))
    for k in range(steps + 1):
        x = round(p0[0] + (p1[0] - p0[0]) * k / steps)
        y = round(p0[1] + (p1[1] - p0[1]) * k / steps)
        if 0 <= y < px.shape[0] and 0 <= x < px.shape[1]:
            px[y, x] = GRID


def render_vertex_view(state: CubeState, viewpoint: Viewpoint) -> RenderedImage:
    px = np.empty((VERTEX_SIZE, VERTEX_SIZE, 3), dtype=np.uint8)
    px[:] = BACKGROUND
    faces = _vertex_panel_faces(viewpoint.vertex)
    for panel in _PANEL_ORDER:
        face, row_dir, col_dir = faces[panel]
        fn = _PANELS[panel]
        cells = _scan_face(state, face, row_dir, col_dir)
        for r in range(3):
            for c in range(3):
                quad = (fn(r, c), fn(r, c + 1), fn(r + 1, c + 1), fn(r + 1, c))
                _fill_quad(px, quad, PALETTE[cells[3 * r + c]])
    for panel in _PANEL_ORDER:
        fn = _PANELS[panel]
        for k in range(4):
            _draw_line(px, fn(k, 0), fn(k, 3))
            _draw_line(px, fn(0, k), fn(3, k))
    return RenderedImage(px)


def observe(state: CubeState, tier: Tier, viewpoint: Viewpoint | None = None):
    """O(s): the tier-appropriate observation; returns str or RenderedImage."""
    if viewpoint is None:
        viewpoint = Viewpoint.for_tier(tier)
    viewpoint.check(tier)
    if tier == Tier.FULL_SYMBOLIC:
        return encode_initial(state)
    if tier == Tier.FULL_VISUAL:
        return render_full_visual(state)
    if tier == Tier.FACE_VIEW:
        return render_face_view(state, viewpoint)
    return render_vertex_view(state, viewpoint)


# ------------------------------------------------------------ parse (oracle)

_RGB_TO_COLOR = {rgb: c for c, rgb in PALETTE.items()}


def _classify(px: np.ndarray, x: int, y: int) -> str:
    rgb = tuple(int(v) for v in px[y, x])
    color = _RGB_TO_COLOR.get(rgb)
    if color is None:
        raise UnclassifiablePixel(f"pixel at ({x}, {y}) is {rgb}, not a sticker color")
    return color


def parse_rendered(image: RenderedImage, tier: Tier,
                   viewpoint: Viewpoint | None = None) -> list[str]:
    """Recover the visible sticker colors from a rendered image (test oracle).

    full_visual yields 54 colors in Initial-format order; face_view yields the
    9 visible cells in image order; vertex_view yields 27 colors panel by panel
    (top, left, right), each row-major in image order.
    """
    if viewpoint is None:
        viewpoint = Viewpoint.for_tier(tier)
    px = image.pixels
    if tier == Tier.FULL_VISUAL:
        out = [""] * 54
        for face, (col, row) in _NET_SLOTS.items():
            centers = _block_centers(col * _NET_PITCH + 4, row * _NET_PITCH + 4)
            for k, (x, y) in enumerate(centers):
                out[FACES.index(face) * 9 + k] = _classify(px, x, y)
        return out
    if tier == Tier.FACE_VIEW:
        return [_classify(px, x, y) for x, y in _block_centers(4, 4)]
    if tier == Tier.VERTEX_VIEW:
        out = []
        for panel in _PANEL_ORDER:
            fn = _PANELS[panel]
            for r in range(3):
                for c in range(3):
                    corners = (fn(r, c), fn(r, c + 1), fn(r + 1, c + 1), fn(r + 1, c))
                    cx = sum(p[0] for p in corners) / 4
                    cy = sum(p[1] for p in corners) / 4
                    out.append(_classify(px, round(cx), round(cy)))
        return out
    raise WrongTier("full_symbolic has no rendered form")


def visible_stickers(state: CubeState, tier: Tier,
                     viewpoint: Viewpoint | None = None) -> list[str]:
    """Ground truth for parse_rendered, straight from the state."""
    if viewpoint is None:
        viewpoint = Viewpoint.for_tier(tier)
    if tier == Tier.FULL_VISUAL:
        return list(state.stickers)
    if tier == Tier.FACE_VIEW:
        return _face_view_cells(state, viewpoint)
    if tier == Tier.VERTEX_VIEW:
        out: list[str] = []
        faces = _vertex_panel_faces(viewpoint.vertex)
        for panel in _PANEL_ORDER:
            face, row_dir, col_dir = faces[panel]
            out.extend(_scan_face(state, face, row_dir, col_dir))
        return out
    raise WrongTier("full_symbolic has no rendered form")
