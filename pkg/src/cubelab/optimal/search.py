"""Provably optimal solving and exact-depth certification via IDA*.

The search runs over (corner permutation, corner twist) coordinates plus the
tracked slots/flips of the two six-edge groups; together these determine the
full state, so (0, 0, home, home) is exactly the solved cube. h is the max of
the three pattern databases. Bounds rise to the minimum f that exceeded the
previous bound; exhausting bound b proves no solution of length <= b exists,
which is what depth certification records.

Node budgets make runs deterministic and certificates resumable: a run that
stops early reports the largest fully exhausted bound plus the next bound to
try, and a follow-up run continues from there.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
import numpy as np
from numba import njit

from ..cube import CubeState
from ..cubies import CubieState, decompose_cubies
from ..twophase import coords as co
from ..twophase.search import MovePlan, _plan_from_moves
from .pdb import _FLIP_DELTA, _SLOT_DEST, _arrange_rank, PatternDatabases

_T = co.N_TWIST

# outcome codes from the kernel
_FOUND, _EXHAUSTED, _BUDGET = 0, 1, 2


@njit(cache=True)
def _h3(cperm, twist, slotsa, flipsa, slotsb, flipsb, pdb_c, pdb_a, pdb_b):
    h = pdb_c[cperm * 2187 + twist]
    ha = pdb_a[(_arrange_rank(slotsa) << 6) | flipsa]
    if ha > h:
        h = ha
    hb = pdb_b[(_arrange_rank(slotsb) << 6) | flipsb]
    if hb > h:
        h = hb
    return h


@njit(cache=True)
def _ida_kernel(cperm0, twist0, slotsa0, flipsa0, slotsb0, flipsb0,
                bound0, depth_cap, max_nodes,
                cperm_move, twist_move, slot_dest, flip_delta,
                pdb_c, pdb_a, pdb_b,
                plan_out, progress):
    """IDA* driver. progress: [nodes, exhausted_bound, next_bound, found_depth].

    Returns _FOUND / _EXHAUSTED / _BUDGET. Exhausted means no solution with
    length <= depth_cap exists. On _BUDGET the recorded bounds stay valid.
    """
    INF = 127
    nodes = 0
    exhausted = bound0 - 1
    bound = bound0

    # explicit DFS stacks (depth <= 20)
    cp_s = np.empty(22, dtype=np.int64)
    tw_s = np.empty(22, dtype=np.int64)
    sa_s = np.empty((22, 6), dtype=np.int64)
    fa_s = np.empty(22, dtype=np.int64)
    sb_s = np.empty((22, 6), dtype=np.int64)
    fb_s = np.empty(22, dtype=np.int64)
    prev_s = np.empty(22, dtype=np.int64)
    mi_s = np.empty(22, dtype=np.int64)

    h_root = _h3(cperm0, twist0, slotsa0, flipsa0, slotsb0, flipsb0, pdb_c, pdb_a, pdb_b)
    if h_root == 0:
        progress[0] = nodes
        progress[1] = exhausted
        progress[3] = 0
        return _FOUND
    if bound < h_root:
        bound = h_root
    # admissibility already rules out every length below the first bound tried
    exhausted = bound - 1

    while bound <= depth_cap:
        min_exceed = INF
        cp_s[0] = cperm0
        tw_s[0] = twist0
        for i in range(6):
            sa_s[0, i] = slotsa0[i]
            sb_s[0, i] = slotsb0[i]
        fa_s[0] = flipsa0
        fb_s[0] = flipsb0
        prev_s[0] = -1
        mi_s[0] = 0
        depth = 0
        while depth >= 0:
            mi = mi_s[depth]
            pushed = False
            while mi < 18:
                m = mi
                mi += 1
                f = m // 3
                prev = prev_s[depth]
                if prev >= 0:
                    if f == prev:
                        continue
                    if f % 3 == prev % 3 and f < prev:
                        continue
                nodes += 1
                if nodes > max_nodes:
                    progress[0] = nodes
                    progress[1] = exhausted
                    progress[2] = bound
                    return _BUDGET
                c2 = cperm_move[cp_s[depth], m]
                t2 = twist_move[tw_s[depth], m]
                fa2 = 0
                fb2 = 0
                for i in range(6):
                    s = sa_s[depth, i]
                    sa_s[depth + 1, i] = slot_dest[m, s]
                    if ((fa_s[depth] >> i) & 1) ^ flip_delta[m, s]:
                        fa2 |= 1 << i
                    s = sb_s[depth, i]
                    sb_s[depth + 1, i] = slot_dest[m, s]
                    if ((fb_s[depth] >> i) & 1) ^ flip_delta[m, s]:
                        fb2 |= 1 << i
                h = _h3(c2, t2, sa_s[depth + 1], fa2, sb_s[depth + 1], fb2,
                        pdb_c, pdb_a, pdb_b)
                g2 = depth + 1
                if h == 0:
                    plan_out[depth] = m
                    progress[0] = nodes
                    progress[1] = exhausted
                    progress[3] = g2
                    return _FOUND
                if g2 + h > bound:
                    if g2 + h < min_exceed:
                        min_exceed = g2 + h
                    continue
                mi_s[depth] = mi
                plan_out[depth] = m
                cp_s[depth + 1] = c2
                tw_s[depth + 1] = t2
                fa_s[depth + 1] = fa2
                fb_s[depth + 1] = fb2
                prev_s[depth + 1] = f
                mi_s[depth + 1] = 0
                depth += 1
                pushed = True
                break
            if not pushed:
                depth -= 1
        exhausted = bound
        progress[0] = nodes
        progress[1] = exhausted
        if min_exceed == INF:
            progress[2] = INF
            return _EXHAUSTED
        bound = min_exceed
        progress[2] = bound
    progress[0] = nodes
    progress[1] = depth_cap if exhausted > depth_cap else exhausted
    return _EXHAUSTED


def _search_inputs(cubies: CubieState):
    cperm = co.get_cperm(cubies)
    twist = co.get_twist(cubies)
    slots = [0] * 12
    for slot, piece in enumerate(cubies.edge_perm):
        slots[piece] = slot
    slotsa = np.asarray(slots[0:6], dtype=np.int64)
    slotsb = np.asarray(slots[6:12], dtype=np.int64)
    flipsa = 0
    flipsb = 0
    for i in range(6):
        flipsa |= cubies.edge_orient[slotsa[i]] << i
        flipsb |= cubies.edge_orient[slotsb[i]] << i
    return cperm, twist, slotsa, flipsa, slotsb, flipsb


@dataclass
class Certificate:
    """Auditable record of an IDA* run: what was proven and at what cost."""

    status: str                      # certified | refuted | deeper | budget_exceeded
    target_depth: int
    optimal_depth: int | None
    witness: str | None              # rendered MovePlan of an optimal solution
    exhausted_bound: int             # no solution of length <= this exists
    next_bound: int | None           # where a resumed run continues
    nodes: int
    heuristics: tuple[str, ...] = ("corners", "edges_a", "edges_b")
    wall_seconds: float = field(default=0.0, compare=False)

    def to_json(self) -> str:
        d = dict(self.__dict__)
        d["heuristics"] = list(self.heuristics)
        return json.dumps(d)

    @staticmethod
    def from_json(text: str) -> "Certificate":
        d = json.loads(text)
        d["heuristics"] = tuple(d.get("heuristics", ()))
        return Certificate(**d)


@dataclass
class OptimalResult:
    plan: MovePlan
    depth: int
    certificate: Certificate


class ExceedsCap(Exception):
    """No solution within depth_cap; carries the certificate of that fact."""

    def __init__(self, certificate: Certificate):
        super().__init__(f"no solution within depth cap (exhausted {certificate.exhausted_bound})")
        self.certificate = certificate


class SearchBudgetExceeded(Exception):
    """Node budget ran out; carries partial progress for resumption."""

    def __init__(self, certificate: Certificate):
        super().__init__("optimal search budget exceeded")
        self.certificate = certificate


def _run(cubies: CubieState, pdbs: PatternDatabases, depth_cap: int, max_nodes: int,
         start_bound: int, base_nodes: int, target_depth: int):
    cperm, twist, slotsa, flipsa, slotsb, flipsb = _search_inputs(cubies)
    plan_out = np.zeros(22, dtype=np.int64)
    progress = np.zeros(4, dtype=np.int64)
    t0 = time.monotonic()
    code = _ida_kernel(cperm, twist, slotsa, flipsa, slotsb, flipsb,
                       start_bound, depth_cap, max_nodes,
                       pdbs.cperm_move, pdbs.twist_move, _SLOT_DEST, _FLIP_DELTA,
                       pdbs.corners, pdbs.edges_a, pdbs.edges_b, plan_out, progress)
    wall = time.monotonic() - t0
    nodes = int(progress[0]) + base_nodes
    exhausted = int(progress[1])
    if code == _FOUND:
        depth = int(progress[3])
        plan = _plan_from_moves(plan_out[:depth].tolist())
        return plan, depth, exhausted, nodes, wall
    if code == _BUDGET:
        cert = Certificate(status="budget_exceeded", target_depth=target_depth,
                           optimal_depth=None, witness=None, exhausted_bound=exhausted,
                           next_bound=int(progress[2]), nodes=nodes, wall_seconds=wall)
        raise SearchBudgetExceeded(cert)
    cert = Certificate(status="deeper", target_depth=target_depth, optimal_depth=None,
                       witness=None, exhausted_bound=min(exhausted, depth_cap),
                       next_bound=None, nodes=nodes, wall_seconds=wall)
    raise ExceedsCap(cert)


def solve_optimal(state: CubeState, pdbs: PatternDatabases, depth_cap: int = 20,
                  max_nodes: int = 2**62) -> OptimalResult:
    """Minimum-length HTM solution via IDA*; raises ExceedsCap past depth_cap."""
    if depth_cap > 20:
        raise ValueError("depth_cap must be <= 20 (God's number)")
    cubies = decompose_cubies(state)
    plan, depth, exhausted, nodes, wall = _run(cubies, pdbs, depth_cap, max_nodes,
                                               0, 0, depth_cap)
    cert = Certificate(status="certified", target_depth=depth, optimal_depth=depth,
                       witness=plan.rendered, exhausted_bound=exhausted,
                       next_bound=None, nodes=nodes, wall_seconds=wall)
    return OptimalResult(plan=plan, depth=depth, certificate=cert)


def certify_depth(state: CubeState, depth: int, pdbs: PatternDatabases,
                  max_nodes: int = 2**62,
                  resume: Certificate | None = None) -> Certificate:
    """Prove the state's optimal depth equals `depth`.

    certified: a depth-`depth` solution exists and every bound below was
    exhausted. refuted: the true optimal depth differs (recorded). A run that
    hits its node budget returns status budget_exceeded; pass that certificate
    back as `resume` to continue from the last exhausted bound.
    """
    if not 0 <= depth <= 20:
        raise ValueError("depth must be within 0..20")
    cubies = decompose_cubies(state)
    start_bound = 0
    base_nodes = 0
    if resume is not None:
        if resume.status != "budget_exceeded" or resume.next_bound is None:
            raise ValueError("resume certificate must carry budget_exceeded progress")
        start_bound = resume.next_bound
        base_nodes = resume.nodes
    try:
        plan, found, exhausted, nodes, wall = _run(cubies, pdbs, depth, max_nodes,
                                                   start_bound, base_nodes, depth)
    except ExceedsCap as exc:
        cert = exc.certificate
        return Certificate(status="deeper", target_depth=depth, optimal_depth=None,
                           witness=None, exhausted_bound=cert.exhausted_bound,
                           next_bound=None, nodes=cert.nodes,
                           wall_seconds=cert.wall_seconds)
    except SearchBudgetExceeded as exc:
        return exc.certificate
    if found == depth:
        status = "certified"
    else:
        status = "refuted"
    return Certificate(status=status, target_depth=depth, optimal_depth=found,
                       witness=plan.rendered, exhausted_bound=exhausted,
                       next_bound=None, nodes=nodes, wall_seconds=wall)


def heuristic_value(state: CubeState, pdbs: PatternDatabases) -> int:
    """h(state) = max over the three databases (admissible lower bound)."""
    cperm, twist, slotsa, flipsa, slotsb, flipsb = _search_inputs(decompose_cubies(state))
    return int(_h3(cperm, twist, slotsa, flipsa, slotsb, flipsb,
                   pdbs.corners, pdbs.edges_a, pdbs.edges_b))
