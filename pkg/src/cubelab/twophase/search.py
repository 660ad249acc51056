"""Two-phase solving: reduce to the subgroup H, then finish inside H.

Phase 1 enumerates maneuvers of increasing length that bring the state into H
(canonical ones only: a maneuver never ends with a phase-2 move, since dropping
that move would already have reached H). Each maneuver's phase-2 completion is
solved optimally under the current cap; the best total keeps shrinking until it
meets `length_goal`, the maneuver space is exhausted, or the budget runs out.
With complete tables a solution always exists at total length <= 30 (phase 1
<= 12 plus phase 2 <= 18).

The search kernel is numba-compiled and budgeted in *nodes*, which makes every
call deterministic; `time_budget` seconds convert at a fixed conservative rate.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np
from numba import njit

from ..codecs import from_solver_format, validate_solver
from ..cube import CubeError, CubeState, Move
from ..cubies import CubieState, decompose_cubies
from . import coords as co
from .tables import PruningTables

_PLAN_RE = re.compile(r"^\s*((?:[URFDLB][123]\s+)*)\((\d+)f\)\s*$")

# conversion rate for time_budget -> node budget; measured ~150M/s on desk
# hardware, kept conservative so slower machines stay inside the wall budget
NODES_PER_SECOND = 50_000_000

_P2MOVES = np.asarray(co.PHASE2_MOVES, dtype=np.int64)
_P2MASK = np.zeros(18, dtype=np.uint8)
_P2MASK[list(co.PHASE2_MOVES)] = 1

_MCP = np.asarray([c.corner_perm for c in co.MOVE_CUBIE], dtype=np.int8)
_MCO = np.asarray([c.corner_orient for c in co.MOVE_CUBIE], dtype=np.int8)
_MEP = np.asarray([c.edge_perm for c in co.MOVE_CUBIE], dtype=np.int8)
_MEO = np.asarray([c.edge_orient for c in co.MOVE_CUBIE], dtype=np.int8)

# state-cell indices for the kernel's scratch array
_BEST_LEN, _DONE, _NODES, _ABORT = 0, 1, 2, 3


class InvalidCubeString(CubeError):
    """Solver input rejected; str(exc) is the tool's verbatim error string."""


class TimeBudgetExceeded(CubeError):
    pass


@dataclass(frozen=True)
class MovePlan:
    """Solver output: face-turn tokens in the `X1 Y2 ... (Nf)` grammar."""

    tokens: tuple[tuple[str, int], ...]

    @property
    def rendered(self) -> str:
        parts = [f"{face}{power}" for face, power in self.tokens]
        parts.append(f"({len(self.tokens)}f)")
        return " ".join(parts)

    @property
    def length(self) -> int:
        return len(self.tokens)

    def to_moves(self) -> list[Move]:
        return expand_plan(self)

    def __str__(self) -> str:
        return self.rendered


def parse_plan(text: str) -> MovePlan:
    """Parse the rendered grammar, checking the (Nf) count against the tokens."""
    m = _PLAN_RE.match(text)
    if not m:
        raise ValueError(f"not a move plan: {text!r}")
    tokens = tuple((tok[0], int(tok[1])) for tok in m.group(1).split())
    if len(tokens) != int(m.group(2)):
        raise ValueError(f"token count {len(tokens)} does not match ({m.group(2)}f)")
    return MovePlan(tokens)


def expand_plan(plan: MovePlan) -> list[Move]:
    """Quarter-turn expansion: X1 -> X, X2 -> X X, X3 -> X' (canonical)."""
    out: list[Move] = []
    for face, power in plan.tokens:
        if power == 1:
            out.append(Move(face))
        elif power == 2:
            out.extend((Move(face), Move(face)))
        else:
            out.append(Move(face, prime=True))
    return out


def _plan_from_moves(maneuver) -> MovePlan:
    return MovePlan(tuple((co.FACE_ORDER[m // 3], m % 3 + 1) for m in maneuver))


@njit(cache=True)
def _rank_perm(perm, n):
    rank = 0
    for i in range(n):
        smaller = 0
        for j in range(i + 1, n):
            if perm[j] < perm[i]:
                smaller += 1
        rank = rank * (n - i) + smaller
    return rank


@njit(cache=True)
def _p2_try(cperm0, udep0, sperm0, bound, prev0, cperm_move, udep_move, sliceperm_move,
            pcs, pus, path2, state, max_nodes):
    """Exact-length-`bound` phase-2 search (explicit stack); fills path2 on success."""
    if bound == 0:
        return cperm0 == 0 and udep0 == 0 and sperm0 == 0
    cp_s = np.empty(20, dtype=np.int64)
    ud_s = np.empty(20, dtype=np.int64)
    sp_s = np.empty(20, dtype=np.int64)
    prev_s = np.empty(20, dtype=np.int64)
    mi_s = np.empty(20, dtype=np.int64)
    cp_s[0] = cperm0
    ud_s[0] = udep0
    sp_s[0] = sperm0
    prev_s[0] = prev0
    mi_s[0] = 0
    depth = 0
    while depth >= 0:
        cperm = cp_s[depth]
        udep = ud_s[depth]
        sperm = sp_s[depth]
        prev = prev_s[depth]
        mi = mi_s[depth]
        pushed = False
        while mi < 10:
            m = _P2MOVES[mi]
            mi += 1
            f = m // 3
            if prev >= 0:
                if f == prev:
                    continue
                if f % 3 == prev % 3 and f < prev:
                    continue
            state[_NODES] += 1
            if state[_NODES] > max_nodes:
                state[_ABORT] = 1
                return False
            c2 = cperm_move[cperm, m]
            u2 = udep_move[udep, m]
            s2 = sliceperm_move[sperm, m]
            togo = bound - depth - 1
            if togo == 0:
                if c2 == 0 and u2 == 0 and s2 == 0:
                    path2[depth] = m
                    return True
                continue
            ha = pcs[c2 * 24 + s2]
            hb = pus[u2 * 24 + s2]
            if (ha if ha > hb else hb) > togo:
                continue
            mi_s[depth] = mi
            path2[depth] = m
            depth += 1
            cp_s[depth] = c2
            ud_s[depth] = u2
            sp_s[depth] = s2
            prev_s[depth] = f
            mi_s[depth] = 0
            pushed = True
            break
        if not pushed:
            depth -= 1
    return False


@njit(cache=True)
def _run_junction(path1, depth1, scp, sco, sep, seo, cperm_move, udep_move,
                  sliceperm_move, pcs, pus, path2, best_plan, state,
                  goal, cap_limit, max_nodes):
    # multiply the start cubies by the phase-1 maneuver
    cp = scp.copy()
    cco = sco.copy()
    ep = sep.copy()
    eo = seo.copy()
    ncp = np.empty(8, dtype=np.int8)
    nco = np.empty(8, dtype=np.int8)
    nep = np.empty(12, dtype=np.int8)
    neo = np.empty(12, dtype=np.int8)
    for k in range(depth1):
        m = path1[k]
        for i in range(8):
            t = _MCP[m, i]
            ncp[i] = cp[t]
            nco[i] = (cco[t] + _MCO[m, i]) % 3
        for i in range(12):
            t = _MEP[m, i]
            nep[i] = ep[t]
            neo[i] = (eo[t] + _MEO[m, i]) % 2
        cp, ncp = ncp, cp
        cco, nco = nco, cco
        ep, nep = nep, ep
        eo, neo = neo, eo

    cperm = _rank_perm(cp, 8)
    udep = _rank_perm(ep[:8], 8)
    four = np.empty(4, dtype=np.int8)
    for i in range(4):
        four[i] = ep[8 + i] - 8
    sperm = _rank_perm(four, 4)
    state[_NODES] += depth1 + 8   # junction work is not free; keep budgets honest

    if state[_BEST_LEN] < 99:
        cap = state[_BEST_LEN] - depth1 - 1
    else:
        cap = cap_limit - depth1
    if cap > 18:
        cap = 18
    if cap < 0:
        return

    if cperm == 0 and udep == 0 and sperm == 0:
        for k in range(depth1):
            best_plan[k] = path1[k]
        state[_BEST_LEN] = depth1
        if depth1 <= goal:
            state[_DONE] = 1
        return

    ha = pcs[cperm * 24 + sperm]
    hb = pus[udep * 24 + sperm]
    h = ha if ha > hb else hb
    if h > cap:
        return
    prev = path1[depth1 - 1] // 3 if depth1 > 0 else -1
    lo = h if h > 1 else 1
    for bound in range(lo, cap + 1):
        if _p2_try(cperm, udep, sperm, bound, prev, cperm_move, udep_move,
                   sliceperm_move, pcs, pus, path2, state, max_nodes):
            for k in range(depth1):
                best_plan[k] = path1[k]
            for k in range(bound):
                best_plan[depth1 + k] = path2[k]
            state[_BEST_LEN] = depth1 + bound
            if depth1 + bound <= goal:
                state[_DONE] = 1
            return
        if state[_ABORT]:
            return


@njit(cache=True)
def _p1_enumerate(twist0, flip0, slc0, length1, path1, scp, sco, sep, seo,
                  twist_move, flip_move, slice_move, cperm_move, udep_move,
                  sliceperm_move, pts, pfs, pcs, pus, path2, best_plan, state,
                  goal, cap_limit, max_nodes):
    """Stream all canonical phase-1 maneuvers of exactly `length1` into junctions."""
    if length1 == 0:
        if twist0 == 0 and flip0 == 0 and slc0 == 0:
            _run_junction(path1, 0, scp, sco, sep, seo, cperm_move, udep_move,
                          sliceperm_move, pcs, pus, path2, best_plan, state,
                          goal, cap_limit, max_nodes)
        return
    t_s = np.empty(14, dtype=np.int64)
    f_s = np.empty(14, dtype=np.int64)
    s_s = np.empty(14, dtype=np.int64)
    prev_s = np.empty(14, dtype=np.int64)
    mi_s = np.empty(14, dtype=np.int64)
    t_s[0] = twist0
    f_s[0] = flip0
    s_s[0] = slc0
    prev_s[0] = -1
    mi_s[0] = 0
    depth = 0
    while depth >= 0:
        twist = t_s[depth]
        flip = f_s[depth]
        slc = s_s[depth]
        prev = prev_s[depth]
        m = mi_s[depth]
        pushed = False
        while m < 18:
            mv = m
            m += 1
            f = mv // 3
            if prev >= 0:
                if f == prev:
                    continue
                if f % 3 == prev % 3 and f < prev:
                    continue
            state[_NODES] += 1
            if state[_NODES] > max_nodes:
                state[_ABORT] = 1
                return
            t2 = twist_move[twist, mv]
            f2 = flip_move[flip, mv]
            s2 = slice_move[slc, mv]
            togo = length1 - depth - 1
            if togo == 0:
                if t2 == 0 and f2 == 0 and s2 == 0 and _P2MASK[mv] == 0:
                    path1[depth] = mv
                    _run_junction(path1, length1, scp, sco, sep, seo, cperm_move,
                                  udep_move, sliceperm_move, pcs, pus, path2,
                                  best_plan, state, goal, cap_limit, max_nodes)
                    if state[_DONE] or state[_ABORT]:
                        return
                continue
            ha = pts[t2 * 495 + s2]
            hb = pfs[f2 * 495 + s2]
            if (ha if ha > hb else hb) > togo:
                continue
            mi_s[depth] = m
            path1[depth] = mv
            depth += 1
            t_s[depth] = t2
            f_s[depth] = f2
            s_s[depth] = s2
            prev_s[depth] = f
            mi_s[depth] = 0
            pushed = True
            break
        if not pushed:
            depth -= 1
    return


@njit(cache=True)
def _solve_kernel(scp, sco, sep, seo, twist0, flip0, slc0, goal, max_total, max_nodes,
                  twist_move, flip_move, slice_move, cperm_move, udep_move,
                  sliceperm_move, pts, pfs, pcs, pus, best_plan):
    state = np.zeros(4, dtype=np.int64)
    state[_BEST_LEN] = 99
    path1 = np.zeros(13, dtype=np.int64)
    path2 = np.zeros(20, dtype=np.int64)
    ha = pts[twist0 * 495 + slc0]
    hb = pfs[flip0 * 495 + slc0]
    start = int(ha if ha > hb else hb)
    # stage 0: iterate tiny total allowances exactly, so near-solved inputs get
    # provably minimal plans (a depth-1 state always comes back as one token)
    shallow_cap = goal if goal < 5 else 5
    for total in range(start, shallow_cap + 1):
        for depth1 in range(start, total + 1):
            _p1_enumerate(twist0, flip0, slc0, depth1, path1, scp, sco, sep, seo,
                          twist_move, flip_move, slice_move, cperm_move, udep_move,
                          sliceperm_move, pts, pfs, pcs, pus, path2, best_plan, state,
                          goal, total, max_nodes)
            if state[_ABORT]:
                break
        if state[_BEST_LEN] < 99 or state[_ABORT]:
            break
    if state[_BEST_LEN] < 99 or state[_ABORT]:
        return state[_BEST_LEN]
    # main pass: only look for totals within the goal; junction searches stay
    # shallow, so many phase-1 maneuvers get probed cheaply
    for depth1 in range(start, 13):
        if state[_DONE] or state[_ABORT]:
            break
        if depth1 >= state[_BEST_LEN]:
            break
        _p1_enumerate(twist0, flip0, slc0, depth1, path1, scp, sco, sep, seo,
                      twist_move, flip_move, slice_move, cperm_move, udep_move,
                      sliceperm_move, pts, pfs, pcs, pus, path2, best_plan, state,
                      goal, goal, max_nodes)
    if state[_BEST_LEN] == 99:
        # nothing within the goal (budget ran dry or no such total exists):
        # widen the allowance one move at a time; every pass stays shallow, and
        # a solution always exists by max_total = phase-1 + phase-2 diameters
        for cap_limit in range(goal + 1, max_total + 1):
            state[_ABORT] = 0
            grace = state[_NODES] + 8_000_000
            for depth1 in range(start, 13):
                if state[_BEST_LEN] < 99 or state[_ABORT]:
                    break
                _p1_enumerate(twist0, flip0, slc0, depth1, path1, scp, sco, sep, seo,
                              twist_move, flip_move, slice_move, cperm_move, udep_move,
                              sliceperm_move, pts, pfs, pcs, pus, path2, best_plan,
                              state, goal, cap_limit, grace)
            if state[_BEST_LEN] < 99:
                break
    return state[_BEST_LEN]


def solve_cubies(start: CubieState, tables: PruningTables, length_goal: int = 20,
                 time_budget: float | None = 1.0, max_total: int = 30,
                 node_budget: int | None = None) -> MovePlan:
    """Solve at the cubie level. Budgets: explicit `node_budget` wins, otherwise
    `time_budget` seconds are converted at NODES_PER_SECOND; None means unbounded."""
    if node_budget is None:
        node_budget = (int(time_budget * NODES_PER_SECOND)
                       if time_budget is not None else 2**62)
    scp = np.asarray(start.corner_perm, dtype=np.int8)
    sco = np.asarray(start.corner_orient, dtype=np.int8)
    sep = np.asarray(start.edge_perm, dtype=np.int8)
    seo = np.asarray(start.edge_orient, dtype=np.int8)
    best_plan = np.zeros(31, dtype=np.int64)
    length = _solve_kernel(
        scp, sco, sep, seo,
        co.get_twist(start), co.get_flip(start), co.get_slice(start),
        length_goal, max_total, node_budget,
        tables.twist_move, tables.flip_move, tables.slice_move,
        tables.cperm_move, tables.udep_move, tables.sliceperm_move,
        tables.prun_twist_slice, tables.prun_flip_slice,
        tables.prun_cperm_slice, tables.prun_udep_slice, best_plan)
    if length >= 99:
        raise TimeBudgetExceeded("no solution found within the search budget")
    return _plan_from_moves(best_plan[:length].tolist())


def solve_state(state: CubeState, tables: PruningTables, length_goal: int = 20,
                time_budget: float | None = 1.0, max_total: int = 30,
                node_budget: int | None = None) -> MovePlan:
    return solve_cubies(decompose_cubies(state), tables, length_goal, time_budget,
                        max_total, node_budget)


def solve_facelets(text: str, tables: PruningTables, length_goal: int = 20,
                   time_budget: float | None = 1.0, max_total: int = 30,
                   node_budget: int | None = None) -> MovePlan:
    """Solve a solver-format string; invalid input raises with the verbatim error."""
    err = validate_solver(text)
    if err is not None:
        raise InvalidCubeString(err)
    state = from_solver_format(text)
    return solve_state(state, tables, length_goal, time_budget, max_total, node_budget)
