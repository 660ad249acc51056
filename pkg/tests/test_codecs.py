import pytest

from cubelab.codecs import (SOLVED_SOLVER, DecodeError, decode_initial, encode_initial,
                            from_solver_format, initial_error_string, to_solver_format,
                            validate_solver)
from cubelab.cube import SOLVED, scramble

SOLVED_TEXT = "RRRRRRRRRGGGGGGGGGBBBBBBBBBYYYYYYYYYOOOOOOOOOWWWWWWWWW"


def test_solved_encodings():
    assert encode_initial(SOLVED) == SOLVED_TEXT
    assert decode_initial(SOLVED_TEXT) == SOLVED
    assert to_solver_format(SOLVED) == SOLVED_SOLVER == "U" * 9 + "R" * 9 + "F" * 9 + "D" * 9 + "L" * 9 + "B" * 9


def test_round_trip_on_random_states():
    for seed in range(1000):
        st, _ = scramble(seed, 25)
        assert decode_initial(encode_initial(st)) == st


def test_solver_format_round_trip_and_validation():
    for seed in range(300):
        st, _ = scramble(7000 + seed, 25)
        text = to_solver_format(st)
        assert sorted(text.count(f) for f in "URFDLB") == [9] * 6
        assert validate_solver(text) is None
        assert from_solver_format(text) == st


def test_decode_errors():
    with pytest.raises(DecodeError) as err:
        decode_initial(SOLVED_TEXT[:-1])
    assert err.value.kind == "BadLength"
    with pytest.raises(DecodeError) as err:
        decode_initial(SOLVED_TEXT[:-1] + "Z")
    assert err.value.kind == "BadAlphabet"
    with pytest.raises(DecodeError) as err:
        decode_initial(SOLVED_TEXT.replace("W", "Y", 1))
    assert err.value.kind == "BadColorCount"
    swapped = list(SOLVED_TEXT)
    # swap two centers: counts stay balanced but the centers move
    swapped[4], swapped[13] = swapped[13], swapped[4]
    with pytest.raises(DecodeError) as err:
        decode_initial("".join(swapped))
    assert err.value.kind == "BadCenters"
    flipped = list(SOLVED_TEXT)
    flipped[43], flipped[1] = flipped[1], flipped[43]
    with pytest.raises(DecodeError) as err:
        decode_initial("".join(flipped))
    assert err.value.kind == "Unreachable"


def test_count_error_string_byte_exact():
    bad = "FFUBULUBURRRRRRRRRURDFFRUULDDRRDDLRURRUULUULULBDFBDFUU"
    assert validate_solver(bad) == (
        "Error: Cube definition string FFUBULUBURRRRRRRRRURDFFRUULDDRRDDLRURRUULUULULBDFBDFUU "
        "does not contain exactly 9 facelets of each color.")


def test_undefined_edges_error_string():
    text = list(to_solver_format(SOLVED))
    # make the UR edge show U on both stickers (indices 5 and 10), rebalancing
    # the letter counts through the UB edge's U sticker
    text[10] = "U"
    text[1] = "R"
    msg = validate_solver("".join(text))
    assert msg == "Error: Some edges are undefined."


def test_orientation_and_parity_error_strings():
    flipped = list(to_solver_format(SOLVED))
    flipped[1], flipped[46] = flipped[46], flipped[1]   # flip the UB edge in place
    assert validate_solver("".join(flipped)) == "Error: Total edge flip is wrong."

    twisted = list(to_solver_format(SOLVED))
    tri = (8, 9, 20)     # URF corner facelets in solver indexing
    twisted[tri[0]], twisted[tri[1]], twisted[tri[2]] = (
        twisted[tri[2]], twisted[tri[0]], twisted[tri[1]])
    assert validate_solver("".join(twisted)) == "Error: Total corner twist is wrong."

    # swapping two edges (UR <-> UF both stickers) flips permutation parity
    swapped = list(to_solver_format(SOLVED))
    for a, b in ((5, 7), (10, 19)):
        swapped[a], swapped[b] = swapped[b], swapped[a]
    assert validate_solver("".join(swapped)) == "Error: Wrong edge and corner parity."


def test_length_errors():
    assert "contains less than 54 facelets" in validate_solver("UUU")
    assert "contains more than 54 facelets" in validate_solver("U" * 55)


def test_naive_b_face_conversion_fails_edge_check():
    # reading the B block without the half-turn correction produces exactly
    # this failure, which is how the working conversion gets discovered
    naive = (tuple(range(36, 45)) + tuple(range(27, 36)) + tuple(range(0, 9))
             + tuple(range(45, 54)) + tuple(range(18, 27)) + tuple(range(9, 18)))
    color_to_face = {"O": "U", "Y": "R", "R": "F", "W": "D", "B": "L", "G": "B"}
    rejected = 0
    for seed in range(40):
        st, _ = scramble(4000 + seed, 25)
        text = "".join(color_to_face[st.stickers[i]] for i in naive)
        if validate_solver(text) == "Error: Some edges are undefined.":
            rejected += 1
    assert rejected >= 30


def test_initial_error_string():
    assert initial_error_string(SOLVED_TEXT) is None
    assert "does not contain exactly 9 facelets" in initial_error_string(
        SOLVED_TEXT.replace("W", "Y", 1))
    flipped = list(SOLVED_TEXT)
    flipped[43], flipped[1] = flipped[1], flipped[43]
    assert initial_error_string("".join(flipped)) == "Error: Total edge flip is wrong."


def test_conversion_is_a_fixed_permutation():
    from cubelab.codecs import FROM_SOLVER_INDEX, TO_SOLVER_INDEX

    assert sorted(TO_SOLVER_INDEX) == list(range(54))
    for i in range(54):
        assert TO_SOLVER_INDEX[FROM_SOLVER_INDEX[i]] == i
