"""Pattern databases for the optimal solver.

Three exhaustive distance tables, each an admissible (and within its own
abstraction, exact) lower bound on HTM distance to solved:

  corners  -- corner permutation x corner twist      (8! * 3^7  = 88,179,840)
  edges_a  -- slots+flips of edges UR,UF,UL,UB,DR,DF (12P6 * 2^6 = 42,577,920)
  edges_b  -- slots+flips of edges DL,DB,FR,FL,BL,BR (same size)

h = max of the three is the classic Korf configuration. Builds run a full BFS
over each abstract space (numpy-chunked for corners, a numba kernel for the
edge groups) and land in one cached file.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numba import njit

from ..cache import CacheCorrupt, default_table_dir, load_arrays, save_arrays
from ..twophase import coords as co

PDB_VERSION = "pdb-v2"
CACHE_FILE = "optimal_pdbs.tbl"

N_CORNER = co.N_CPERM * co.N_TWIST
N_ARRANGE = 12 * 11 * 10 * 9 * 8 * 7          # ordered placements of 6 edges
N_EDGE = N_ARRANGE * 64

EDGES_A = (0, 1, 2, 3, 4, 5)    # UR UF UL UB DR DF
EDGES_B = (6, 7, 8, 9, 10, 11)  # DL DB FR FL BL BR

# piece-in-slot transition tables: piece sitting in slot s moves to
# _SLOT_DEST[m, s] and gains flip _FLIP_DELTA[m, s]
_SLOT_DEST = np.empty((18, 12), dtype=np.int8)
_FLIP_DELTA = np.empty((18, 12), dtype=np.int8)
for _m, _cub in enumerate(co.MOVE_CUBIE):
    for _dest in range(12):
        _src = _cub.edge_perm[_dest]
        _SLOT_DEST[_m, _src] = _dest
        _FLIP_DELTA[_m, _src] = _cub.edge_orient[_dest]


@njit(cache=True)
def _arrange_rank(slots):
    rank = 0
    for i in range(6):
        c = slots[i]
        for j in range(i):
            if slots[j] < slots[i]:
                c -= 1
        rank = rank * (12 - i) + c
    return rank


@njit(cache=True)
def _arrange_unrank(rank, slots):
    digits = np.empty(6, dtype=np.int64)
    for i in range(5, -1, -1):
        base = 12 - i
        digits[i] = rank % base
        rank //= base
    used = np.zeros(12, dtype=np.uint8)
    for i in range(6):
        c = digits[i]
        for s in range(12):
            if used[s]:
                continue
            if c == 0:
                slots[i] = s
                used[s] = 1
                break
            c -= 1


@njit(cache=True)
def _edge_bfs(dist, slot_dest, flip_delta, start):
    dist[start] = 0
    slots = np.empty(6, dtype=np.int64)
    nslots = np.empty(6, dtype=np.int64)
    d = 0
    while True:
        found = False
        for idx in range(dist.shape[0]):
            if dist[idx] != d:
                continue
            found = True
            flips = idx & 63
            _arrange_unrank(idx >> 6, slots)
            for m in range(18):
                nflips = 0
                for i in range(6):
                    s = slots[i]
                    nslots[i] = slot_dest[m, s]
                    if ((flips >> i) & 1) ^ flip_delta[m, s]:
                        nflips |= 1 << i
                nidx = (_arrange_rank(nslots) << 6) | nflips
                if dist[nidx] == 255:
                    dist[nidx] = d + 1
        if not found:
            break
        d += 1


def _build_edge_pdb(pieces) -> np.ndarray:
    dist = np.full(N_EDGE, 255, dtype=np.uint8)
    start_slots = np.asarray(pieces, dtype=np.int64)
    start = int(_arrange_rank(start_slots)) << 6
    _edge_bfs(dist, _SLOT_DEST, _FLIP_DELTA, start)
    return dist


def _build_corner_pdb(cperm_move: np.ndarray, twist_move: np.ndarray) -> np.ndarray:
    dist = np.full(N_CORNER, 255, dtype=np.uint8)
    dist[0] = 0
    depth = 0
    chunk = 4_000_000
    while True:
        frontier = np.flatnonzero(dist == depth)
        if frontier.size == 0:
            break
        for lo in range(0, frontier.size, chunk):
            part = frontier[lo:lo + chunk]
            perm, twist = np.divmod(part, co.N_TWIST)
            for m in range(18):
                nxt = cperm_move[perm, m].astype(np.int64) * co.N_TWIST + twist_move[twist, m]
                fresh = nxt[dist[nxt] == 255]
                dist[fresh] = depth + 1
        depth += 1
    return dist


@dataclass
class PatternDatabases:
    """Immutable bundle of the distance tables plus the coordinate move tables
    the IDA* kernel drives them with; safe to share across threads."""

    version: str
    corners: np.ndarray
    edges_a: np.ndarray
    edges_b: np.ndarray
    cperm_move: np.ndarray
    twist_move: np.ndarray
    build_seconds: float = field(default=0.0, compare=False)

    @property
    def heuristic_ids(self) -> tuple[str, ...]:
        return ("corners", "edges_a", "edges_b")

    def stats(self) -> dict[str, dict[str, int]]:
        out = {}
        for name in self.heuristic_ids:
            arr = getattr(self, name)
            out[name] = {"size": int(arr.size), "max": int(arr.max())}
        return out


def build_pdbs(cache_path: Path | None = None,
               move_tables=None) -> PatternDatabases:
    """Load the cached databases if intact, otherwise run the BFS builds and cache.

    `move_tables` optionally supplies prebuilt (cperm_move, twist_move) arrays to
    avoid recomputing them when the two-phase tables are already in memory.
    """
    if cache_path is None:
        cache_path = default_table_dir() / CACHE_FILE
    cache_path = Path(cache_path)
    if cache_path.exists():
        try:
            raw = load_arrays(cache_path, PDB_VERSION)
            return PatternDatabases(PDB_VERSION, raw["corners"], raw["edges_a"],
                                    raw["edges_b"], raw["cperm_move"], raw["twist_move"])
        except (CacheCorrupt, KeyError):
            pass
    t0 = time.monotonic()
    if move_tables is not None:
        cperm_move, twist_move = move_tables
    else:
        cperm_move = np.asarray(co.build_move_table(co.N_CPERM, co.get_cperm, co.set_cperm),
                                dtype=np.int32).reshape(co.N_CPERM, 18)
        twist_move = np.asarray(co.build_move_table(co.N_TWIST, co.get_twist, co.set_twist),
                                dtype=np.int32).reshape(co.N_TWIST, 18)
    pdbs = PatternDatabases(
        version=PDB_VERSION,
        corners=_build_corner_pdb(cperm_move, twist_move),
        edges_a=_build_edge_pdb(EDGES_A),
        edges_b=_build_edge_pdb(EDGES_B),
        cperm_move=cperm_move,
        twist_move=twist_move,
        build_seconds=time.monotonic() - t0,
    )
    save_arrays(cache_path, PDB_VERSION,
                {"corners": pdbs.corners, "edges_a": pdbs.edges_a, "edges_b": pdbs.edges_b,
                 "cperm_move": pdbs.cperm_move, "twist_move": pdbs.twist_move})
    return pdbs
