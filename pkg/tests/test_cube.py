import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubelab.cube import (MOVE_PERMS, MOVES, SOLVED, SOLVED_STICKERS, CubeState,
                          Move, format_moves, invert_seq, parse_moves, scramble)
from cubelab.cubies import (IDENTITY, MOVE_CUBIES, InvalidStateError, compose_stickers,
                            decompose_cubies, is_reachable)

U = Move.parse("U")
R = Move.parse("R")


def test_solved_constants():
    assert SOLVED.is_solved()
    assert SOLVED.stickers == "RRRRRRRRRGGGGGGGGGBBBBBBBBBYYYYYYYYYOOOOOOOOOWWWWWWWWW"


def test_every_move_changes_exactly_twenty_positions():
    for move, perm in MOVE_PERMS.items():
        changed = sum(1 for i in range(54) if perm[i] != i)
        assert changed == 20, move


def test_u_turn_displaces_twelve_side_stickers():
    after = SOLVED.apply(U)
    assert after.face("U") == "O" * 9
    correct = sum(1 for a, b in zip(after.stickers, SOLVED_STICKERS) if a == b)
    assert correct == 42


def test_move_order_four():
    st, _ = scramble(3, 15)
    for move in MOVES:
        cur = st
        for _ in range(4):
            cur = cur.apply(move)
        assert cur == st


def test_move_then_inverse_is_identity():
    st, _ = scramble(9, 20)
    for move in MOVES:
        assert st.apply(move).apply(move.inverse()) == st


def test_ru_has_order_105():
    st = SOLVED
    n = 0
    while True:
        st = st.apply(R).apply(U)
        n += 1
        if st == SOLVED:
            break
    assert n == 105


def test_opposite_faces_commute():
    st, _ = scramble(4, 18)
    for a, b in (("R", "L"), ("U", "D"), ("F", "B")):
        ma, mb = Move.parse(a), Move.parse(b)
        assert st.apply(ma).apply(mb) == st.apply(mb).apply(ma)


def test_sticker_multiset_conserved():
    st, _ = scramble(11, 30)
    for color in "WRBOGY":
        assert st.stickers.count(color) == 9


def test_centers_fixed():
    st, _ = scramble(21, 30)
    for idx, color in ((4, "R"), (13, "G"), (22, "B"), (31, "Y"), (40, "O"), (49, "W")):
        assert st.stickers[idx] == color


def test_invert_seq_round_trip():
    rng = random.Random(5)
    for trial in range(1000):
        seq = [MOVES[rng.randrange(12)] for _ in range(rng.randrange(0, 20))]
        st, _ = scramble(trial, 10)
        assert st.apply_seq(seq).apply_seq(invert_seq(seq)) == st


def test_move_parsing_round_trip():
    assert parse_moves("U R' F") == [Move("U"), Move("R", True), Move("F")]
    assert format_moves([Move("F"), Move("U", True)]) == "F U'"
    assert invert_seq(parse_moves("F U'")) == parse_moves("U F'")
    with pytest.raises(ValueError):
        Move.parse("X")
    with pytest.raises(ValueError):
        Move.parse("U2")


def test_scramble_deterministic_and_no_immediate_inverse():
    s1, q1 = scramble(42, 25)
    s2, q2 = scramble(42, 25)
    assert s1 == s2 and q1 == q2
    for a, b in zip(q1, q1[1:]):
        assert b != a.inverse()
    s0, q0 = scramble(1, 0)
    assert s0.is_solved() and q0 == []


def test_scrambles_decompose_to_valid_cubies():
    for seed in range(1000):
        st, _ = scramble(seed, 25)
        cubies = decompose_cubies(st)
        assert compose_stickers(cubies) == st


def test_cubie_multiply_matches_sticker_moves():
    rng = random.Random(7)
    for _ in range(200):
        st, _ = scramble(rng.randrange(10_000), rng.randrange(0, 25))
        cubies = decompose_cubies(st)
        move = MOVES[rng.randrange(12)]
        assert decompose_cubies(st.apply(move)) == cubies.multiply(MOVE_CUBIES[move])


def test_solved_decomposes_to_identity():
    assert decompose_cubies(SOLVED) == IDENTITY
    assert IDENTITY.is_identity()


def test_edge_sticker_swap_rejected():
    s = list(SOLVED_STICKERS)
    s[43], s[1] = s[1], s[43]     # flip the UF edge in place
    assert not is_reachable(CubeState("".join(s)))
    with pytest.raises(InvalidStateError):
        decompose_cubies(CubeState("".join(s)))


def test_single_corner_twist_rejected():
    st = SOLVED.apply(U)
    s = list(st.stickers)
    # rotate the stickers of the corner at URF in place: a lone twist
    tri = (44, 27, 2)
    s[tri[0]], s[tri[1]], s[tri[2]] = s[tri[2]], s[tri[0]], s[tri[1]]
    assert not is_reachable(CubeState("".join(s)))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(min_value=0, max_value=11), min_size=0, max_size=40))
def test_group_closure_property(move_ids):
    state = SOLVED
    for i in move_ids:
        state = state.apply(MOVES[i])
    assert is_reachable(state)


def test_recorded_trace_state_is_d_prime_of_solved():
    # a recorded interaction trace printed this exact state after an L move; it
    # equals D' applied to solved, pinning the D-move cycle and the B-face layout
    expected = "RRRRRRYYYBBBGGGGGGBBBBBBRRRYYYYYYGGGOOOOOOOOOWWWWWWWWW"
    assert SOLVED.apply(Move.parse("D'")).stickers == expected


def test_recorded_episode_moves_solve_recorded_state():
    # a recorded episode: this exact quarter-turn expansion of a 20-token plan
    # solved this exact state; exercises every face's permutation end to end
    from cubelab.codecs import decode_initial
    from cubelab.cube import parse_moves

    state = decode_initial("WYYYRBOWGYWRWGBRWGOOYGBRWOYOOORYOBGBBYBROGGGRGBWYWBRRW")
    moves = parse_moves(
        "U U U F F R R U U F F D D F F L B B B R U U F F F D D D "
        "L L L B B B U U L L R D D D U")
    assert state.apply_seq(moves).is_solved()
