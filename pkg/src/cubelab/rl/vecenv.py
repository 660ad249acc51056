"""Vectorized full-symbolic cube environments for policy training.

States live in a (n_envs, 54) uint8 array of color codes; the 12 quarter turns
are row gathers through the frozen permutation tables. Rewards are the sparse
terminal signal (1.0 on reaching solved); episodes truncate at `move_cap`
makes and auto-reset through the configured sampler.
"""

from __future__ import annotations

import random
from typing import Callable

import numpy as np

from ..cube import COLORS, MOVE_PERMS, MOVES, SOLVED_STICKERS, CubeState

N_ACTIONS = 12

_CODE = {c: i for i, c in enumerate(COLORS)}
SOLVED_CODES = np.array([_CODE[c] for c in SOLVED_STICKERS], dtype=np.uint8)

# ACTION_PERMS[a, i] = source index feeding sticker i under action a, in the
# same action order as cube.MOVES
ACTION_PERMS = np.array([MOVE_PERMS[m] for m in MOVES], dtype=np.int64)


def encode_state(state: CubeState) -> np.ndarray:
    return np.array([_CODE[c] for c in state.stickers], dtype=np.uint8)


def decode_state(codes: np.ndarray) -> CubeState:
    return CubeState("".join(COLORS[int(c)] for c in codes))


def one_hot(states: np.ndarray) -> np.ndarray:
    """(n, 54) color codes -> (n, 324) float32 one-hot features."""
    n = states.shape[0]
    feat = np.zeros((n, 54 * 6), dtype=np.float32)
    cols = np.arange(54) * 6 + states
    feat[np.arange(n)[:, None], cols] = 1.0
    return feat


def scramble_sampler(length: int) -> Callable[[random.Random], np.ndarray]:
    """Sampler drawing `length`-move scrambles (no immediate inverses)."""

    def sample(rng: random.Random) -> np.ndarray:
        state = SOLVED_CODES.copy()
        last = -1
        for _ in range(length):
            while True:
                a = rng.randrange(N_ACTIONS)
                if last >= 0 and (a ^ 1) == last:
                    continue
                break
            state = state[ACTION_PERMS[a]]
            last = a
        return state

    return sample


def bank_sampler(states: list[np.ndarray]) -> Callable[[random.Random], np.ndarray]:
    """Sampler drawing uniformly from a precomputed bank (e.g. exact-depth states)."""

    def sample(rng: random.Random) -> np.ndarray:
        return states[rng.randrange(len(states))].copy()

    return sample


class VecCubeEnv:
    """n_envs independent episodes advancing in lockstep."""

    def __init__(self, n_envs: int, sampler: Callable[[random.Random], np.ndarray],
                 move_cap: int, seed: int = 0):
        self.n_envs = n_envs
        self.sampler = sampler
        self.move_cap = move_cap
        self.rng = random.Random(seed)
        self.states = np.zeros((n_envs, 54), dtype=np.uint8)
        self.steps = np.zeros(n_envs, dtype=np.int64)
        for i in range(n_envs):
            self.states[i] = self.sampler(self.rng)

    def set_sampler(self, sampler: Callable[[random.Random], np.ndarray],
                    move_cap: int | None = None) -> None:
        self.sampler = sampler
        if move_cap is not None:
            self.move_cap = move_cap
        self.reset_all()

    def reset_all(self) -> None:
        for i in range(self.n_envs):
            self.states[i] = self.sampler(self.rng)
        self.steps[:] = 0

    def step(self, actions: np.ndarray):
        """Apply one action per env; returns (rewards, dones) and auto-resets.

        rewards are the sparse terminal signal; dones marks both solves and
        move-cap truncations.
        """
        rows = np.arange(self.n_envs)[:, None]
        self.states = self.states[rows, ACTION_PERMS[actions]]
        self.steps += 1
        solved = (self.states == SOLVED_CODES).all(axis=1)
        rewards = solved.astype(np.float32)
        dones = solved | (self.steps >= self.move_cap)
        for i in np.flatnonzero(dones):
            self.states[i] = self.sampler(self.rng)
            self.steps[i] = 0
        return rewards, dones
