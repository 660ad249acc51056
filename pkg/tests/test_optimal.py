import random

import pytest

from cubelab.bfs import bfs_depths
from cubelab.cube import SOLVED, CubeState, Move, scramble
from cubelab.optimal import (Certificate, ExceedsCap, build_pdbs, certify_depth,
                             heuristic_value, solve_optimal)

U = Move.parse("U")


def test_pdb_identity_and_maxima(pdbs):
    assert pdbs.corners[0] == 0          # identity corner coordinate
    assert pdbs.edges_a[0] == 0          # group A home arrangement ranks to 0
    assert int(pdbs.corners.max()) == 11
    assert int(pdbs.edges_a.max()) <= 20 and int(pdbs.edges_b.max()) <= 20
    assert heuristic_value(SOLVED, pdbs) == 0


def test_pdb_rebuild_deterministic(tmp_path, pdbs):
    import numpy as np

    rebuilt = build_pdbs(tmp_path / "pdbs.tbl",
                         move_tables=(pdbs.cperm_move, pdbs.twist_move))
    assert np.array_equal(rebuilt.corners, pdbs.corners)
    assert np.array_equal(rebuilt.edges_a, pdbs.edges_a)
    assert np.array_equal(rebuilt.edges_b, pdbs.edges_b)
    again = build_pdbs(tmp_path / "pdbs.tbl")    # cache hit
    assert np.array_equal(again.corners, pdbs.corners)


def test_bfs_level_counts(bfs4):
    counts = {}
    for depth in bfs4.values():
        counts[depth] = counts.get(depth, 0) + 1
    assert counts[0] == 1
    assert counts[1] == 18
    assert counts[2] == 243
    assert counts[3] == 3240


def test_solver_depth_matches_bfs_exhaustively(pdbs, bfs4):
    """Every state of HTM depth <= 4 solves at exactly its BFS depth."""
    for stickers, depth in bfs4.items():
        state = CubeState(stickers)
        result = solve_optimal(state, pdbs)
        assert result.depth == depth, stickers
        assert result.plan.length == depth
        assert state.apply_seq(result.plan.to_moves()).is_solved()


def test_admissibility_on_random_states(pdbs):
    rng = random.Random(0)
    for _ in range(120):
        st, _ = scramble(rng.randrange(10**6), rng.randrange(0, 9))
        h = heuristic_value(st, pdbs)
        result = solve_optimal(st, pdbs)
        assert h <= result.depth


def test_bound_sequence_and_certificate(pdbs):
    st, _ = scramble(77, 9)
    result = solve_optimal(st, pdbs)
    cert = result.certificate
    assert cert.status == "certified"
    assert cert.optimal_depth == result.depth
    assert cert.exhausted_bound == result.depth - 1 or result.depth == 0
    assert cert.heuristics == ("corners", "edges_a", "edges_b")
    assert cert.nodes > 0
    round_trip = Certificate.from_json(cert.to_json())
    assert round_trip.status == cert.status and round_trip.nodes == cert.nodes


def test_certify_basics(pdbs):
    assert certify_depth(SOLVED, 0, pdbs).status == "certified"
    su = SOLVED.apply(U)
    assert certify_depth(su, 1, pdbs).status == "certified"
    refuted = certify_depth(su, 2, pdbs)
    assert refuted.status == "refuted" and refuted.optimal_depth == 1
    deeper = certify_depth(SOLVED.apply(U).apply(Move.parse("R")), 1, pdbs)
    assert deeper.status == "deeper"


def test_certify_depths_up_to_eight(pdbs, tables):
    """Generator + certifier round trip for the CI depths."""
    from cubelab.tasks import TaskGenerator

    gen = TaskGenerator(tables, pdbs)
    for depth in (1, 2, 3, 4, 8):
        case = gen.generate_case(depth, seed=900 + depth)
        cert = certify_depth(case.cube(), depth, pdbs)
        assert cert.status == "certified", (depth, cert)


def test_exceeds_cap(pdbs):
    st, _ = scramble(123, 25)    # comfortably deeper than 4
    with pytest.raises(ExceedsCap) as err:
        solve_optimal(st, pdbs, depth_cap=4)
    assert err.value.certificate.exhausted_bound <= 4


def test_budget_and_resume(pdbs, tables):
    from cubelab.tasks import TaskGenerator

    case = TaskGenerator(tables, pdbs).generate_case(8, seed=31)
    state = case.cube()
    budget = 1
    partial = None
    while True:
        cert = certify_depth(state, 8, pdbs, max_nodes=budget, resume=partial)
        if cert.status != "budget_exceeded":
            break
        assert cert.next_bound is not None
        partial = cert
        budget *= 8
    assert cert.status == "certified"
    assert partial is not None
    one_shot = certify_depth(state, 8, pdbs)
    assert cert.optimal_depth == one_shot.optimal_depth == 8


def test_optimal_never_longer_than_two_phase(pdbs, tables):
    from cubelab.twophase import solve_state

    rng = random.Random(17)
    for _ in range(40):
        st, _ = scramble(rng.randrange(10**6), rng.randrange(0, 10))
        optimal = solve_optimal(st, pdbs).depth
        plan = solve_state(st, tables)
        assert optimal <= plan.length


def test_admissibility_exhaustive_near_solved(pdbs, bfs4):
    # h <= true depth for every state the BFS oracle covers (~47k checks)
    for stickers, depth in bfs4.items():
        assert heuristic_value(CubeState(stickers), pdbs) <= depth


def test_sampled_equivalence_depths_5_to_7(pdbs):
    """BFS-free spot check: scrambles of length d have depth <= d, and the
    solver's plan re-applied is always a solution of exactly its depth."""
    from cubelab.bfs import bfs_depths

    oracle5 = bfs_depths(5)
    rng = random.Random(9)
    sampled = [s for s, d in oracle5.items() if d == 5]
    for stickers in rng.sample(sampled, 100):
        st = CubeState(stickers)
        assert solve_optimal(st, pdbs).depth == 5


@pytest.mark.nightly
def test_certify_depth_twelve(pdbs, tables):
    from cubelab.tasks import TaskGenerator

    gen = TaskGenerator(tables, pdbs)
    case = gen.generate_case(12, seed=7)
    cert = certify_depth(case.cube(), 12, pdbs)
    assert cert.status == "certified"


@pytest.mark.offline
@pytest.mark.parametrize("depth", [16, 20])
def test_certify_long_horizon_offline(pdbs, tables, depth):
    """Hours-scale: full certification of the long-horizon depths."""
    from cubelab.tasks import TaskGenerator

    gen = TaskGenerator(tables, pdbs, certify_nodes=2**45)
    case = gen.generate_case(depth, seed=1)
    cert = certify_depth(case.cube(), depth, pdbs, max_nodes=2**45)
    assert cert.status in ("certified", "refuted", "deeper")
