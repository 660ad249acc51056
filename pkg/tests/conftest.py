import random

import pytest

from cubelab.cube import MOVES, CubeState, scramble


@pytest.fixture(scope="session")
def tables():
    from cubelab.twophase import build_tables

    return build_tables()


@pytest.fixture(scope="session")
def pdbs():
    from cubelab.optimal import build_pdbs

    return build_pdbs()


@pytest.fixture(scope="session")
def bfs4():
    """Exact HTM depth of every state within 4 moves of solved (BFS oracle)."""
    from cubelab.bfs import bfs_depths

    return bfs_depths(4)


def random_states(n: int, length: int = 25, seed: int = 0) -> list[CubeState]:
    return [scramble(seed * 100_000 + i, length)[0] for i in range(n)]


def random_move_seq(rng: random.Random, length: int):
    return [MOVES[rng.randrange(12)] for _ in range(length)]
