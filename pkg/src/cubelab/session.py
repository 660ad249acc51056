"""Live episodes: the action/tool surface, budgets, termination, and logging.

A session owns one scrambled cube and exposes exactly the agent-facing tools:
make_move / submit_moves / get_observation / apply_view_transformation and the
two planner tools. Moves advance the state and return the configured dense
reward; observations and view changes never touch the state or the make_move
counter. A step is one full agent exchange, marked by step_boundary(), which
also enforces the step and wall-clock budgets. The event log is append-only
and replayable: re-running the logged actions from the initial state must
reproduce the final state and status.
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Callable, Iterable, Sequence

from .codecs import decode_initial, initial_error_string
from .cube import CubeError, CubeState, Move
from .metrics import MetricKind, dense_reward
from .observe import (PARTIAL_TIERS, RenderedImage, Tier, Viewpoint, WrongTier,
                      apply_view_transformation, observe)
from .twophase import (InvalidCubeString, PruningTables, solve_facelets,
                       solve_state)


class SessionStatus(str, Enum):
    RUNNING = "running"
    PASSED = "passed"
    FAILED_BUDGET = "failed_budget"
    FAILED_TIMEOUT = "failed_timeout"


class SolverTool(str, Enum):
    NONE = "none"
    STANDARD = "standard"
    IDEAL = "ideal"


class SessionTerminated(CubeError):
    pass


class ToolUnavailable(CubeError):
    pass


@dataclass(frozen=True)
class SessionConfig:
    tier: Tier = Tier.FULL_SYMBOLIC
    metric: MetricKind = MetricKind.NO_REWARD
    solver_tool: SolverTool = SolverTool.NONE
    max_steps: int = 20
    timeout: float = 1800.0           # seconds of wall clock per episode
    mode: str = "code"                # code | no_code (recorded, not enforced)
    case_id: str | None = None
    depth: int | None = None          # certified depth when launched from a case
    solver_time_budget: float = 1.0   # planner-tool improvement budget
    solver_length_goal: int = 20

    def to_dict(self) -> dict:
        d = asdict(self)
        d["tier"] = self.tier.value
        d["metric"] = self.metric.value
        d["solver_tool"] = self.solver_tool.value
        return d

    @staticmethod
    def from_dict(d: dict) -> "SessionConfig":
        d = dict(d)
        d["tier"] = Tier(d.get("tier", "full_symbolic"))
        d["metric"] = MetricKind(d.get("metric", "no_reward"))
        d["solver_tool"] = SolverTool(d.get("solver_tool", "none"))
        return SessionConfig(**d)


@dataclass
class EpisodeRecord:
    """Replayable summary of one finished (or abandoned) episode."""

    config: dict
    initial_state: str
    final_state: str
    final_status: str
    passed: bool
    moves_made: int
    steps_used: int
    wall_seconds: float
    reward_trace: list[float]
    events: list[dict]

    def to_json(self) -> str:
        return json.dumps(self.__dict__)

    @staticmethod
    def from_json(text: str) -> "EpisodeRecord":
        return EpisodeRecord(**json.loads(text))

    def events_jsonl(self) -> str:
        """The raw event stream, one line per event: timestamp, kind, payload."""
        lines = []
        for event in self.events:
            payload = {k: v for k, v in event.items() if k not in ("t", "kind")}
            lines.append(json.dumps({"t": event["t"], "kind": event["kind"],
                                     "payload": payload}))
        return "\n".join(lines) + "\n"


class Session:
    """One live POMDP episode. Single-threaded by contract."""

    def __init__(self, initial_state: CubeState, config: SessionConfig,
                 tables: PruningTables | None = None,
                 clock: Callable[[], float] = time.monotonic):
        if config.solver_tool != SolverTool.NONE and tables is None:
            raise ValueError("planner tools require solver tables")
        self.config = config
        self.initial_state = initial_state
        self.state = initial_state
        self.viewpoint = Viewpoint.for_tier(config.tier)
        self.tables = tables
        self.clock = clock
        self.started = clock()
        self.steps_used = 0
        self.moves_made = 0
        self.status = SessionStatus.PASSED if initial_state.is_solved() else SessionStatus.RUNNING
        self._boundary_after_pass = False
        self.reward_trace: list[float] = []
        self.events: list[dict] = []
        self._log("start", state=initial_state.stickers, config=config.to_dict())

    # -- bookkeeping ---------------------------------------------------------

    def _log(self, kind: str, **payload) -> None:
        self.events.append({"t": round(self.elapsed(), 6), "kind": kind, **payload})

    def elapsed(self) -> float:
        return self.clock() - self.started

    def _check_live(self) -> None:
        if self.status != SessionStatus.RUNNING:
            raise SessionTerminated(f"session is {self.status.value}")
        if self.elapsed() > self.config.timeout:
            self.status = SessionStatus.FAILED_TIMEOUT
            self._log("timeout")
            raise SessionTerminated("session is failed_timeout")

    def _apply_one(self, move: Move) -> float:
        nxt = self.state.apply(move)
        reward = dense_reward(self.state, nxt, self.config.metric)
        self.state = nxt
        self.moves_made += 1
        self.reward_trace.append(reward)
        if nxt.is_solved():
            self.status = SessionStatus.PASSED
        return reward

    # -- agent tools ---------------------------------------------------------

    def make_move(self, move: Move | str) -> float:
        """One face rotation; returns the dense reward of the transition."""
        self._check_live()
        if isinstance(move, str):
            move = Move.parse(move)
        reward = self._apply_one(move)
        self._log("make_move", move=str(move), reward=reward)
        return reward

    def submit_moves(self, seq: Sequence[Move | str] | str) -> list[float]:
        """Apply a pre-planned sequence in order, stopping at the solved state.

        Moves submitted after the solving move are dropped, not errors. An
        empty sequence is a no-op returning [].
        """
        self._check_live()
        if isinstance(seq, str):
            seq = seq.split()
        moves = [Move.parse(m) if isinstance(m, str) else m for m in seq]
        rewards: list[float] = []
        for move in moves:
            rewards.append(self._apply_one(move))
            if self.status == SessionStatus.PASSED:
                break
        self._log("submit_moves", moves=[str(m) for m in moves[:len(rewards)]],
                  rewards=rewards, submitted=len(moves))
        return rewards

    def get_observation(self) -> str | RenderedImage:
        self._check_live()
        obs = observe(self.state, self.config.tier, self.viewpoint)
        self._log("get_observation", tier=self.config.tier.value,
                  viewpoint=self.viewpoint.describe())
        return obs

    def apply_view_transformation(self, direction: str) -> Viewpoint:
        self._check_live()
        if self.config.tier not in PARTIAL_TIERS:
            raise WrongTier("apply_view_transformation is exclusive to the partial tiers")
        self.viewpoint = apply_view_transformation(self.viewpoint, direction, self.config.tier)
        self._log("view", direction=direction, viewpoint=self.viewpoint.describe())
        return self.viewpoint

    def call_planner(self, representation: str) -> str:
        """Two-phase plan for a solver-format string, or the verbatim error text.

        The tool neither applies moves nor checks the string against the live
        state: garbage in, valid-looking plan out.
        """
        self._check_live()
        if self.config.solver_tool not in (SolverTool.STANDARD, SolverTool.IDEAL):
            raise ToolUnavailable("no solver tool configured for this session")
        try:
            plan = solve_facelets(representation, self.tables,
                                  length_goal=self.config.solver_length_goal,
                                  time_budget=self.config.solver_time_budget)
            result = plan.rendered
        except InvalidCubeString as exc:
            result = str(exc)
        self._log("call_planner", output=result)
        return result

    def call_golden_planner(self, representation: str) -> str:
        """Planner with the built-in Initial-format converter (ideal tool only)."""
        self._check_live()
        if self.config.solver_tool != SolverTool.IDEAL:
            raise ToolUnavailable("the golden planner requires the ideal solver tool")
        err = initial_error_string(representation)
        if err is not None:
            result = err
        else:
            state = decode_initial(representation)
            plan = solve_state(state, self.tables,
                               length_goal=self.config.solver_length_goal,
                               time_budget=self.config.solver_time_budget)
            result = plan.rendered
        self._log("call_golden_planner", output=result)
        return result

    # -- episode control -----------------------------------------------------

    def step_boundary(self) -> SessionStatus:
        """Mark the end of one agent exchange and enforce budgets.

        The boundary of the exchange that solved the cube is still legal; any
        boundary after that is rejected.
        """
        if self.status not in (SessionStatus.RUNNING, SessionStatus.PASSED):
            raise SessionTerminated(f"session is {self.status.value}")
        if self.status == SessionStatus.PASSED:
            if self._boundary_after_pass:
                raise SessionTerminated("session is passed")
            self._boundary_after_pass = True
        self.steps_used += 1
        if self.status == SessionStatus.RUNNING:
            if self.elapsed() > self.config.timeout:
                self.status = SessionStatus.FAILED_TIMEOUT
            elif self.steps_used >= self.config.max_steps:
                self.status = SessionStatus.FAILED_BUDGET
        self._log("step", n=self.steps_used, status=self.status.value)
        return self.status

    def close(self) -> EpisodeRecord:
        """Authoritative end of episode; passing requires the solved state."""
        record = EpisodeRecord(
            config=self.config.to_dict(),
            initial_state=self.initial_state.stickers,
            final_state=self.state.stickers,
            final_status=self.status.value,
            passed=self.status == SessionStatus.PASSED,
            moves_made=self.moves_made,
            steps_used=self.steps_used,
            wall_seconds=round(self.elapsed(), 6),
            reward_trace=list(self.reward_trace),
            events=list(self.events),
        )
        self._log("close", status=self.status.value)
        return record


def replay(record: EpisodeRecord, tables: PruningTables | None = None) -> Session:
    """Re-run a record's action trace from its initial state.

    Returns the replayed session; the caller compares final state/status.
    Planner calls are replayed as no-ops (their outputs are already logged and
    they never mutate state), so no solver tables are needed unless provided.
    """
    from dataclasses import replace as _replace

    config = SessionConfig.from_dict(record.config)
    if tables is None and config.solver_tool != SolverTool.NONE:
        config = _replace(config, solver_tool=SolverTool.NONE)
    session = Session(decode_initial(record.initial_state), config, tables=tables,
                      clock=_frozen_clock())
    for event in record.events:
        kind = event["kind"]
        if session.status != SessionStatus.RUNNING and kind in ("make_move", "submit_moves"):
            break
        if kind == "make_move":
            session.make_move(event["move"])
        elif kind == "submit_moves":
            session.submit_moves(event["moves"])
        elif kind == "view":
            session.apply_view_transformation(event["direction"])
        elif kind == "step":
            session.step_boundary()
    return session


def _frozen_clock() -> Callable[[], float]:
    t = [0.0]

    def clock() -> float:
        t[0] += 1e-6
        return t[0]

    return clock


# ------------------------------------------------------------------- metrics

class UnknownCase(CubeError):
    pass


@dataclass
class MetricReport:
    cases: int
    passes: int
    pass_rate: float
    mm_mean_normal: float | None     # mean #MM over normally terminated runs
    mm_mean_passed: float | None     # mean #MM over successful runs
    mm_max_normal: int | None        # max #MM over normally terminated runs
    mr_mean: float | None            # mean of #MM / certified depth

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def compute_metrics(records: Iterable[EpisodeRecord],
                    depths: dict[str, int] | None = None) -> MetricReport:
    """Aggregate episode records into the benchmark's report.

    "Normally terminated" is every status except failed_timeout. The move
    ratio #MR = #MM / depth averages over records whose case depth is known
    and nonzero; pass `depths` as case_id -> certified depth.
    """
    records = list(records)
    passes = [r for r in records if r.passed]
    normal = [r for r in records if r.final_status != SessionStatus.FAILED_TIMEOUT.value]
    ratios: list[float] = []
    for r in records:
        case_id = r.config.get("case_id")
        depth = r.config.get("depth")
        if depths is not None and case_id is not None:
            if case_id not in depths:
                raise UnknownCase(f"record references unknown case {case_id!r}")
            depth = depths[case_id]
        if depth:
            ratios.append(r.moves_made / depth)
    n = len(records)
    return MetricReport(
        cases=n,
        passes=len(passes),
        pass_rate=(len(passes) / n) if n else 0.0,
        mm_mean_normal=(sum(r.moves_made for r in normal) / len(normal)) if normal else None,
        mm_mean_passed=(sum(r.moves_made for r in passes) / len(passes)) if passes else None,
        mm_max_normal=max((r.moves_made for r in normal), default=None),
        mr_mean=(sum(ratios) / len(ratios)) if ratios else None,
    )
