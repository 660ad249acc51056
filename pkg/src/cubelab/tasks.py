"""Exact-depth task generation and the evaluation split.

A test case is a scrambled state whose minimal HTM solution length (depth) is
certified by the optimal solver. Generation is a seeded rejection loop: propose
a scramble a little longer than the target, cheaply discard candidates the
two-phase solver proves too shallow, then certify.

Depths above `inline_certify_max` (16 and 20 in the default split) are too
expensive to certify inline at desk scale; their cases are emitted with
status "pending" certificates carrying the evidence gathered so far (two-phase
upper bound, pattern-database lower bound) and are finished offline through
the resumable certify CLI. Everything at or below the threshold re-certifies.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from hashlib import sha256
from pathlib import Path

from .cube import CubeError, CubeState, scramble
from .codecs import decode_initial, encode_initial
from .observe import Tier
from .optimal import (Certificate, PatternDatabases, SearchBudgetExceeded,
                      certify_depth, heuristic_value)
from .twophase import PruningTables, TimeBudgetExceeded, solve_state

SHORT_HORIZON = (1, 2, 3, 4)
LONG_HORIZON = (8, 12, 16, 20)
DEFAULT_DEPTHS = SHORT_HORIZON + LONG_HORIZON


class GenerationBudgetExceeded(CubeError):
    pass


@dataclass(frozen=True)
class TestCase:
    id: str
    state: str                 # Initial-format string
    depth: int
    seed: int
    certified: bool
    certificate: dict

    def cube(self) -> CubeState:
        return decode_initial(self.state)

    def certificate_checksum(self) -> str:
        return sha256(json.dumps(self.certificate, sort_keys=True).encode()).hexdigest()[:16]


@dataclass(frozen=True)
class SplitConfig:
    depths: tuple[int, ...] = DEFAULT_DEPTHS
    states_per_depth: int = 5
    settings: tuple[Tier, ...] = (Tier.FULL_SYMBOLIC, Tier.FULL_VISUAL,
                                  Tier.FACE_VIEW, Tier.VERTEX_VIEW)
    master_seed: int = 2024
    inline_certify_max: int = 12
    attempts_per_case: int = 4000

    @property
    def total_configurations(self) -> int:
        return len(self.depths) * self.states_per_depth * len(self.settings)


@dataclass(frozen=True)
class SplitRow:
    id: str
    depth: int
    state: str
    setting: str
    seed: int
    cert_checksum: str


@dataclass
class Split:
    config: SplitConfig
    cases: list[TestCase]
    rows: list[SplitRow] = field(default_factory=list)

    def case_by_id(self, case_id: str) -> TestCase:
        for case in self.cases:
            if case.id == case_id:
                return case
        raise KeyError(case_id)

    def depths_by_id(self) -> dict[str, int]:
        return {c.id: c.depth for c in self.cases}


def _normalized_cert(cert: Certificate) -> dict:
    d = json.loads(cert.to_json())
    d["wall_seconds"] = 0.0     # keep manifests byte-identical across machines
    return d


class TaskGenerator:
    """Seeded generator bound to one set of solver tables."""

    def __init__(self, tables: PruningTables, pdbs: PatternDatabases,
                 certify_nodes: int = 2_000_000_000,
                 filter_time_budget: float = 0.25):
        self.tables = tables
        self.pdbs = pdbs
        self.certify_nodes = certify_nodes
        self.filter_time_budget = filter_time_budget

    def generate_case(self, target_depth: int, seed: int, case_id: str | None = None,
                      certify: bool = True, attempts: int = 4000) -> TestCase:
        """Rejection-sample a state of exactly `target_depth`, certified.

        With certify=False (used for depths past the inline threshold) the case
        carries a pending certificate: the candidate survived the two-phase
        lower-bound filter but its exact depth is not yet proven.
        """
        if not 0 <= target_depth <= 20:
            raise ValueError("target depth must be within 0..20")
        rng = random.Random(seed * 1_000_003 + target_depth)
        if target_depth == 0:
            cert = certify_depth(CubeState(), 0, self.pdbs)
            return TestCase(case_id or f"d00s{seed}", encode_initial(CubeState()), 0,
                            seed, True, _normalized_cert(cert))
        for attempt in range(attempts):
            length = target_depth + rng.randrange(5)
            state, _ = scramble(0, length, rng=rng)
            if state.is_solved():
                continue
            plan = self._cheap_plan(state, target_depth)
            if plan is not None and plan < target_depth:
                continue                       # provably shallower than the target
            if heuristic_value(state, self.pdbs) > target_depth:
                continue                       # provably deeper than the target
            if not certify:
                pending = Certificate(
                    status="pending", target_depth=target_depth, optimal_depth=None,
                    witness=None, exhausted_bound=0, next_bound=None, nodes=0)
                payload = _normalized_cert(pending)
                payload["two_phase_upper_bound"] = plan
                payload["pdb_lower_bound"] = heuristic_value(state, self.pdbs)
                return TestCase(case_id or f"d{target_depth:02d}s{seed}",
                                encode_initial(state), target_depth, seed, False, payload)
            try:
                cert = certify_depth(state, target_depth, self.pdbs,
                                     max_nodes=self.certify_nodes)
            except SearchBudgetExceeded:
                continue
            if cert.status == "certified":
                return TestCase(case_id or f"d{target_depth:02d}s{seed}",
                                encode_initial(state), target_depth, seed, True,
                                _normalized_cert(cert))
        raise GenerationBudgetExceeded(
            f"no depth-{target_depth} state found in {attempts} attempts (seed {seed})")

    def _cheap_plan(self, state: CubeState, target: int) -> int | None:
        try:
            plan = solve_state(state, self.tables, length_goal=target,
                               time_budget=self.filter_time_budget)
            return plan.length
        except TimeBudgetExceeded:
            return None

    def generate_split(self, config: SplitConfig | None = None) -> Split:
        """The full evaluation split: depths x states x settings, deduplicated.

        The same states are reused across settings, so the default yields
        8 * 5 * 4 = 160 rows. Deterministic for a fixed master seed.
        """
        config = config or SplitConfig()
        master = random.Random(config.master_seed)
        cases: list[TestCase] = []
        for depth in config.depths:
            seen: set[str] = set()
            bucket: list[TestCase] = []
            while len(bucket) < config.states_per_depth:
                seed = master.randrange(2**31)
                case = self.generate_case(
                    depth, seed,
                    case_id=f"d{depth:02d}s{len(bucket)}",
                    certify=depth <= config.inline_certify_max,
                    attempts=config.attempts_per_case)
                if case.state in seen:
                    continue
                seen.add(case.state)
                bucket.append(case)
            cases.extend(bucket)
        rows = [SplitRow(id=case.id, depth=case.depth, state=case.state,
                         setting=setting.value, seed=case.seed,
                         cert_checksum=case.certificate_checksum())
                for case in cases for setting in config.settings]
        return Split(config=config, cases=cases, rows=rows)


# ------------------------------------------------------------------ manifest

def write_manifest(split: Split, path: Path) -> None:
    """Line-delimited manifest: one row record per configuration, then the
    certificate payloads (one per case)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        for row in split.rows:
            fh.write(json.dumps({"kind": "row", **row.__dict__}, sort_keys=True) + "\n")
        for case in split.cases:
            fh.write(json.dumps({"kind": "certificate", "id": case.id,
                                 "depth": case.depth, "state": case.state,
                                 "seed": case.seed, "certified": case.certified,
                                 "certificate": case.certificate},
                                sort_keys=True) + "\n")


def load_manifest(path: Path) -> Split:
    rows: list[SplitRow] = []
    cases: list[TestCase] = []
    with open(path) as fh:
        for line in fh:
            rec = json.loads(line)
            kind = rec.pop("kind")
            if kind == "row":
                rows.append(SplitRow(**rec))
            elif kind == "certificate":
                cases.append(TestCase(id=rec["id"], state=rec["state"], depth=rec["depth"],
                                      seed=rec["seed"], certified=rec["certified"],
                                      certificate=rec["certificate"]))
    settings = tuple(dict.fromkeys(Tier(r.setting) for r in rows))
    depths = tuple(dict.fromkeys(c.depth for c in cases))
    per_depth = sum(1 for c in cases if c.depth == depths[0]) if depths else 0
    config = SplitConfig(depths=depths, states_per_depth=per_depth, settings=settings)
    return Split(config=config, cases=cases, rows=rows)
