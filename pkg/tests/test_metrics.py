import random

import pytest

from cubelab.codecs import decode_initial
from cubelab.cube import MOVES, SOLVED, Move, scramble
from cubelab.metrics import (MetricKind, dense_reward, phi_face, phi_heuristic,
                             phi_sticker, phi_value, terminal_reward)

U = Move.parse("U")


def test_phi_on_solved():
    assert phi_sticker(SOLVED) == 54
    assert phi_face(SOLVED) == 6
    assert phi_heuristic(SOLVED).completed_stage == 7
    assert terminal_reward(SOLVED) == 1


def test_phi_after_one_u():
    st = SOLVED.apply(U)
    assert phi_sticker(st) == 42
    assert phi_face(st) == 2
    assert phi_heuristic(st).completed_stage == 4
    assert terminal_reward(st) == 0


def test_phi_after_single_face_turns_brute_force():
    # independent count against the solved coloring for every quarter turn
    for move in MOVES:
        st = SOLVED.apply(move)
        expected = sum(1 for a, b in zip(st.stickers, SOLVED.stickers) if a == b)
        assert phi_sticker(st) == expected == 42
        uniform = sum(1 for f in range(6)
                      if len(set(st.stickers[9 * f:9 * f + 9])) == 1)
        assert phi_face(st) == uniform == 2


def test_phi_ranges():
    rng = random.Random(0)
    for seed in range(300):
        st, _ = scramble(seed, rng.randrange(0, 30))
        assert 6 <= phi_sticker(st) <= 54
        assert 0 <= phi_face(st) <= 6
        assert 0 <= phi_heuristic(st).completed_stage <= 7
        solved = st.is_solved()
        assert (phi_sticker(st) == 54) == solved
        assert (phi_face(st) == 6) == solved
        assert (phi_heuristic(st).completed_stage == 7) == solved


def test_deep_scrambles_rarely_score():
    zero_face = 0
    zero_stage = 0
    for seed in range(1000):
        st, _ = scramble(seed, 25)
        if phi_face(st) == 0:
            zero_face += 1
        if phi_heuristic(st).completed_stage == 0:
            zero_stage += 1
        assert terminal_reward(st) == 0
    assert zero_face >= 950
    assert zero_stage >= 900


def test_stage_report_cumulative():
    rng = random.Random(1)
    for seed in range(200):
        st, _ = scramble(seed, rng.randrange(0, 12))
        report = phi_heuristic(st)
        naive = 0
        for flag in report.per_stage_flags:
            if not flag:
                break
            naive += 1
        assert report.completed_stage == naive


def test_dense_reward_minus_twelve_anchor():
    st = SOLVED.apply(U)
    assert dense_reward(SOLVED, st, MetricKind.STICKER) == -12.0
    assert dense_reward(st, SOLVED, MetricKind.STICKER) == 12.0


def test_recorded_reward_sequence():
    # sticker-metric trace: +10 for L, -12 for U, +12 undoing, +12 for D (solve)
    s1 = decode_initial("RRRRRRYYYBBBGGGGGGBBBBBBRRRYYYYYYGGGOOOOOOOOOWWWWWWWWW")
    s0 = s1.apply(Move.parse("L'"))
    assert dense_reward(s0, s1, MetricKind.STICKER) == 10.0
    su = s1.apply(U)
    assert dense_reward(s1, su, MetricKind.STICKER) == -12.0
    assert dense_reward(su, s1, MetricKind.STICKER) == 12.0
    sd = s1.apply(Move.parse("D"))
    assert dense_reward(s1, sd, MetricKind.STICKER) == 12.0
    assert sd.is_solved()


def test_white_cross_stage_from_recorded_trace():
    start = decode_initial("GYOGROWRBOWWGGBORRROOWBBRGYYRWBYRWBGYYBGOOBOGRWGYWWBYY")
    after = decode_initial("GYRGRRRRWGGWYGORBBYROGBBYBOWOWYYBYYRORGOOGBOYBWGWWWOWB")
    assert phi_heuristic(start).completed_stage == 0
    assert phi_face(start) == 0
    assert phi_heuristic(after).completed_stage == 1


@pytest.mark.parametrize("kind", [MetricKind.STICKER, MetricKind.FACE, MetricKind.HEURISTIC])
def test_dense_reward_telescopes(kind):
    rng = random.Random(hash(kind) & 0xFFFF)
    for trial in range(100):
        st, _ = scramble(trial, rng.randrange(0, 15))
        cur = st
        total = 0.0
        for _ in range(rng.randrange(1, 25)):
            nxt = cur.apply(MOVES[rng.randrange(12)])
            total += dense_reward(cur, nxt, kind)
            cur = nxt
        assert total == phi_value(cur, kind) - phi_value(st, kind)


def test_dense_reward_antisymmetric_and_no_reward():
    a, _ = scramble(5, 10)
    b = a.apply(U)
    for kind in MetricKind:
        assert dense_reward(a, b, kind) == -dense_reward(b, a, kind)
        assert dense_reward(a, a, kind) == 0.0
    assert dense_reward(a, b, MetricKind.NO_REWARD) == 0.0
