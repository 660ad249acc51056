"""Greedy policy evaluation over manifest cases, reported like any other agent."""

from __future__ import annotations

from ..cube import MOVES
from ..metrics import MetricKind
from ..observe import Tier
from ..session import MetricReport, Session, SessionConfig, SessionStatus, compute_metrics
from ..tasks import TestCase
from .policy import CubePolicy
from .vecenv import encode_state


def evaluate_policy(policy: CubePolicy, cases: list[TestCase],
                    move_cap: int) -> tuple[list, MetricReport]:
    """Argmax rollout per case (full symbolic, sparse reward), capped at move_cap."""
    records = []
    for case in cases:
        config = SessionConfig(tier=Tier.FULL_SYMBOLIC, metric=MetricKind.NO_REWARD,
                               max_steps=move_cap + 1, case_id=case.id, depth=case.depth)
        session = Session(case.cube(), config)
        while session.status == SessionStatus.RUNNING and session.moves_made < move_cap:
            action = int(policy.act_greedy(encode_state(session.state)[None, :])[0])
            session.make_move(MOVES[action])
        records.append(session.close())
    report = compute_metrics(records, depths={c.id: c.depth for c in cases})
    return records, report
