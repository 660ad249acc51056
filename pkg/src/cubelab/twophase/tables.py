"""Move and pruning tables for the two-phase search, built once and cached.

Pruning tables hold exact distances-to-goal inside four product spaces:
  phase 1: (twist x slice) and (flip x slice) under all 18 moves
  phase 2: (cperm x sliceperm) and (udep x sliceperm) under the 10 phase-2 moves
Each is admissible for its phase (a quotient can only be closer than the real
state) and exact within its own space, which the tests exercise directly.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..cache import CacheCorrupt, default_table_dir, load_arrays, save_arrays
from . import coords as co

TABLE_VERSION = "twophase-v1"
CACHE_FILE = "twophase.tbl"


def _bfs_product(ta: np.ndarray, na: int, tb: np.ndarray, nb: int, moves) -> np.ndarray:
    """Exact BFS distances over the product coordinate space (a, b) from (0, 0)."""
    moves = np.asarray(list(moves), dtype=np.int32)
    dist = np.full(na * nb, 255, dtype=np.uint8)
    dist[0] = 0
    frontier = np.array([0], dtype=np.int64)
    depth = 0
    while frontier.size:
        a, b = np.divmod(frontier, nb)
        nxt = []
        for m in moves:
            nxt.append(ta[a, m].astype(np.int64) * nb + tb[b, m])
        candidates = np.unique(np.concatenate(nxt))
        fresh = candidates[dist[candidates] == 255]
        dist[fresh] = depth + 1
        frontier = fresh
        depth += 1
    return dist


@dataclass
class PruningTables:
    """Immutable after construction; share freely across threads.

    Move tables are int32 arrays of shape (coord_size, 18); phase-2-only tables
    keep -1 in the unusable move columns. Pruning tables are flat uint8 arrays.
    """

    version: str
    twist_move: np.ndarray
    flip_move: np.ndarray
    slice_move: np.ndarray
    cperm_move: np.ndarray
    udep_move: np.ndarray
    sliceperm_move: np.ndarray
    prun_twist_slice: np.ndarray
    prun_flip_slice: np.ndarray
    prun_cperm_slice: np.ndarray
    prun_udep_slice: np.ndarray
    build_seconds: float = field(default=0.0, compare=False)

    def phase1_h(self, twist: int, flip: int, slc: int) -> int:
        return int(max(self.prun_twist_slice[twist * co.N_SLICE + slc],
                       self.prun_flip_slice[flip * co.N_SLICE + slc]))

    def phase2_h(self, cperm: int, udep: int, sliceperm: int) -> int:
        return int(max(self.prun_cperm_slice[cperm * co.N_SLICEPERM + sliceperm],
                       self.prun_udep_slice[udep * co.N_SLICEPERM + sliceperm]))


def build_tables(cache_path: Path | None = None) -> PruningTables:
    """Load the cached tables if present and intact, otherwise rebuild + cache.

    Pass cache_path=False-y via CUBELAB_TABLE_DIR to redirect; the rebuild is
    deterministic, so two cold builds produce byte-identical cache files.
    """
    if cache_path is None:
        cache_path = default_table_dir() / CACHE_FILE
    cache_path = Path(cache_path)
    if cache_path.exists():
        try:
            raw = load_arrays(cache_path, TABLE_VERSION)
            return _from_arrays(raw)
        except CacheCorrupt:
            pass  # fall through to rebuild
    t0 = time.monotonic()
    tables = _build_fresh()
    tables.build_seconds = time.monotonic() - t0
    save_arrays(cache_path, TABLE_VERSION, _to_arrays(tables))
    return tables


def _as_move_array(flat: list[int], size: int) -> np.ndarray:
    return np.asarray(flat, dtype=np.int32).reshape(size, co.N_MOVES)


def _build_fresh() -> PruningTables:
    twist_move = _as_move_array(co.build_move_table(co.N_TWIST, co.get_twist, co.set_twist),
                                co.N_TWIST)
    flip_move = _as_move_array(co.build_move_table(co.N_FLIP, co.get_flip, co.set_flip),
                               co.N_FLIP)
    slice_move = _as_move_array(co.build_move_table(co.N_SLICE, co.get_slice, co.set_slice),
                                co.N_SLICE)
    cperm_move = _as_move_array(co.build_move_table(co.N_CPERM, co.get_cperm, co.set_cperm),
                                co.N_CPERM)
    udep_move = _as_move_array(
        co.build_move_table(co.N_UDEP, co.get_udep, co.set_udep, co.PHASE2_MOVES), co.N_UDEP)
    sliceperm_move = _as_move_array(
        co.build_move_table(co.N_SLICEPERM, co.get_sliceperm, co.set_sliceperm,
                            co.PHASE2_MOVES), co.N_SLICEPERM)
    return PruningTables(
        version=TABLE_VERSION,
        twist_move=twist_move,
        flip_move=flip_move,
        slice_move=slice_move,
        cperm_move=cperm_move,
        udep_move=udep_move,
        sliceperm_move=sliceperm_move,
        prun_twist_slice=_bfs_product(twist_move, co.N_TWIST, slice_move, co.N_SLICE,
                                      range(co.N_MOVES)),
        prun_flip_slice=_bfs_product(flip_move, co.N_FLIP, slice_move, co.N_SLICE,
                                     range(co.N_MOVES)),
        prun_cperm_slice=_bfs_product(cperm_move, co.N_CPERM, sliceperm_move, co.N_SLICEPERM,
                                      co.PHASE2_MOVES),
        prun_udep_slice=_bfs_product(udep_move, co.N_UDEP, sliceperm_move, co.N_SLICEPERM,
                                     co.PHASE2_MOVES),
    )


_ARRAY_FIELDS = ("twist_move", "flip_move", "slice_move", "cperm_move", "udep_move",
                 "sliceperm_move", "prun_twist_slice", "prun_flip_slice",
                 "prun_cperm_slice", "prun_udep_slice")


def _to_arrays(t: PruningTables) -> dict[str, np.ndarray]:
    return {name: getattr(t, name) for name in _ARRAY_FIELDS}


def _from_arrays(raw: dict[str, np.ndarray]) -> PruningTables:
    return PruningTables(version=TABLE_VERSION, **{name: raw[name] for name in _ARRAY_FIELDS})
