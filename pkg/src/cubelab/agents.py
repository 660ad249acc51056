"""Scripted reference agents for evaluation runs.

The oracle agent reads the symbolic observation, asks the golden planner for a
plan, and submits the expanded moves: the ceiling configuration (ideal tool on
full_symbolic) that should pass every certified case. The replay agent re-runs
a recorded episode's actions. Both drive sessions directly; the service layer
reuses them through the evaluate command.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable

from .metrics import MetricKind
from .observe import Tier
from .session import (EpisodeRecord, Session, SessionConfig, SolverTool,
                      compute_metrics)
from .tasks import TestCase
from .twophase import PruningTables, expand_plan, parse_plan


def run_oracle_episode(case: TestCase, tables: PruningTables,
                       metric: MetricKind = MetricKind.NO_REWARD,
                       max_steps: int = 20) -> EpisodeRecord:
    """One golden-planner episode on the full symbolic tier."""
    config = SessionConfig(tier=Tier.FULL_SYMBOLIC, metric=metric,
                           solver_tool=SolverTool.IDEAL, max_steps=max_steps,
                           case_id=case.id, depth=case.depth)
    session = Session(case.cube(), config, tables=tables)
    if session.status.value == "running":
        observation = session.get_observation()
        plan_text = session.call_golden_planner(observation)
        session.step_boundary()
        if not plan_text.startswith("Error"):
            moves = expand_plan(parse_plan(plan_text))
            session.submit_moves(moves)
            session.step_boundary()
    return session.close()


def evaluate_oracle(cases: Iterable[TestCase], tables: PruningTables,
                    metric: MetricKind = MetricKind.NO_REWARD):
    """Oracle pass over a set of cases; returns (records, MetricReport)."""
    cases = list(cases)
    records = [run_oracle_episode(case, tables, metric) for case in cases]
    report = compute_metrics(records, depths={c.id: c.depth for c in cases})
    return records, report


def write_episode_log(records: Iterable[EpisodeRecord], path: Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        for record in records:
            fh.write(record.to_json() + "\n")


def read_episode_log(path: Path) -> list[EpisodeRecord]:
    with open(path) as fh:
        return [EpisodeRecord.from_json(line) for line in fh if line.strip()]
