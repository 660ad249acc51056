"""REINFORCE training: Monte-Carlo policy gradient with discounted returns.

The update ascends  E[ sum_t grad log pi(a_t|s_t) * G_t ]  with
G_t = sum_{k>=t} gamma^(k-t) r_k, estimated over a batch of complete episodes
collected from the vectorized environments. Plain REINFORCE by default; a
mean-return baseline can be switched on for stability experiments.

The curriculum trains short-horizon depths in sequence, then (optionally) the
long-horizon depths warm-started from the short model. Phase budgets count
parallel timesteps: one timestep advances all 64 vectorized environments once,
mirroring how the rollout length is quoted per environment.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch

from ..bfs import states_at_depth
from ..cube import CubeError
from .policy import CubePolicy
from .vecenv import VecCubeEnv, bank_sampler, encode_state, one_hot, scramble_sampler


class NonFiniteGradient(CubeError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 5e-4
    gamma: float = 0.99
    n_envs: int = 64
    rollout_steps: int = 512          # parallel-step cap per collection
    batch_episodes: int = 512
    short_schedule: tuple[tuple[int, int], ...] = (
        (1, 40_000), (2, 80_000), (3, 160_000), (4, 320_000))
    long_schedule: tuple[tuple[int, int], ...] = tuple(
        (d, 320_000) for d in range(5, 21))
    short_move_cap: int = 16
    long_move_cap: int = 400
    exact_depth_max: int = 4          # phases at or below draw exact-depth states
    use_baseline: bool = False
    master_seed: int = 0


@dataclass
class Episode:
    states: np.ndarray        # (T, 54) uint8
    actions: np.ndarray       # (T,)
    rewards: np.ndarray       # (T,) float32


def discounted_returns(rewards: np.ndarray, gamma: float) -> np.ndarray:
    """G_t = r_t + gamma * G_{t+1}, computed right to left."""
    out = np.empty_like(rewards, dtype=np.float64)
    acc = 0.0
    for t in range(len(rewards) - 1, -1, -1):
        acc = rewards[t] + gamma * acc
        out[t] = acc
    return out.astype(np.float32)


def collect_episodes(policy: CubePolicy, env: VecCubeEnv, n_episodes: int,
                     gen: torch.Generator, rollout_steps: int) -> tuple[list[Episode], int]:
    """Run the vec envs until `n_episodes` finish or `rollout_steps` elapse.

    Returns the completed episodes plus the number of parallel steps consumed
    (each advances all n_envs environments once). Trajectories still in flight
    at the end of the collection are dropped.
    """
    states_l: list[np.ndarray] = []
    actions_l: list[np.ndarray] = []
    rewards_l: list[np.ndarray] = []
    dones_l: list[np.ndarray] = []
    done_count = 0
    for _ in range(rollout_steps):
        if done_count >= n_episodes:
            break
        states_l.append(env.states.copy())
        actions = policy.act_sampled(states_l[-1], gen)
        rewards, dones = env.step(actions)
        actions_l.append(actions)
        rewards_l.append(rewards)
        dones_l.append(dones)
        done_count += int(dones.sum())
    steps_used = len(states_l)
    if not steps_used:
        return [], 0
    # slice the (T, n_envs, ...) stacks into per-env episodes
    states = np.stack(states_l)
    actions = np.stack(actions_l)
    rewards = np.stack(rewards_l)
    dones = np.stack(dones_l)
    episodes: list[Episode] = []
    for i in range(env.n_envs):
        start = 0
        for t in np.flatnonzero(dones[:, i]):
            end = int(t) + 1
            episodes.append(Episode(states[start:end, i], actions[start:end, i],
                                    rewards[start:end, i]))
            start = end
    return episodes, steps_used


def reinforce_update(policy: CubePolicy, optimizer: torch.optim.Optimizer,
                     episodes: list[Episode], gamma: float,
                     use_baseline: bool = False) -> dict:
    """One gradient step on a batch of episodes; deterministic given the batch.

    A non-finite gradient aborts the update and leaves the parameters intact.
    """
    states = np.concatenate([ep.states for ep in episodes])
    actions = torch.from_numpy(np.concatenate([ep.actions for ep in episodes]))
    returns = np.concatenate([discounted_returns(ep.rewards, gamma) for ep in episodes])
    if use_baseline:
        returns = returns - returns.mean()
    returns_t = torch.from_numpy(returns.astype(np.float32))

    logits = policy(torch.from_numpy(one_hot(states)))
    log_probs = torch.log_softmax(logits, dim=-1)
    chosen = log_probs.gather(1, actions[:, None]).squeeze(1)
    loss = -(chosen * returns_t).sum() / len(episodes)

    optimizer.zero_grad()
    loss.backward()
    for p in policy.parameters():
        if p.grad is not None and not torch.isfinite(p.grad).all():
            optimizer.zero_grad()
            raise NonFiniteGradient("aborted update: non-finite gradient")
    optimizer.step()
    for p in policy.parameters():
        if not torch.isfinite(p).all():
            raise NonFiniteGradient("parameters became non-finite")

    solved = sum(float(ep.rewards.sum() > 0) for ep in episodes)
    return {"loss": float(loss.detach()), "episodes": len(episodes),
            "solve_rate": solved / len(episodes),
            "mean_return": float(np.mean([discounted_returns(ep.rewards, gamma)[0]
                                          for ep in episodes]))}


@dataclass
class TrainResult:
    policy: CubePolicy
    log: list[dict] = field(default_factory=list)


def _phase_sampler(depth: int, config: TrainConfig, banks: dict[int, list[np.ndarray]]):
    if depth <= config.exact_depth_max:
        return bank_sampler(banks[depth])
    return scramble_sampler(depth)


def _exact_depth_banks(max_depth: int) -> dict[int, list[np.ndarray]]:
    buckets = states_at_depth(max_depth)
    return {d: [encode_state_from_str(s) for s in states]
            for d, states in buckets.items() if d >= 1}


def encode_state_from_str(stickers: str) -> np.ndarray:
    from ..cube import CubeState

    return encode_state(CubeState(stickers))


def train_phases(schedule, move_cap: int, policy: CubePolicy, config: TrainConfig,
                 banks: dict[int, list[np.ndarray]], log: list[dict],
                 checkpoint_dir: Path | None = None, tag: str = "short") -> None:
    optimizer = torch.optim.Adam(policy.parameters(), lr=config.learning_rate)
    torch.set_num_threads(1)    # keeps reductions deterministic for fixed seeds
    for depth, budget in schedule:
        gen = torch.Generator().manual_seed(config.master_seed * 9973 + depth)
        env = VecCubeEnv(config.n_envs, _phase_sampler(depth, config, banks),
                         move_cap, seed=config.master_seed * 31 + depth)
        spent = 0
        while spent < budget:
            episodes, steps = collect_episodes(policy, env, config.batch_episodes,
                                               gen, config.rollout_steps)
            spent += steps
            if not episodes:
                continue
            try:
                stats = reinforce_update(policy, optimizer, episodes, config.gamma,
                                         config.use_baseline)
            except NonFiniteGradient:
                log.append({"phase": f"{tag}-d{depth}", "timesteps": spent,
                            "aborted_update": True})
                continue
            log.append({"phase": f"{tag}-d{depth}", "timesteps": spent, **stats})
        if checkpoint_dir is not None:
            from .policy import save_checkpoint

            save_checkpoint(policy, Path(checkpoint_dir) / f"{tag}_d{depth}.pt",
                            {"phase": f"{tag}-d{depth}", "timesteps": spent,
                             "master_seed": config.master_seed})


def train_curriculum(config: TrainConfig | None = None,
                     checkpoint_dir: Path | None = None,
                     include_long: bool = False) -> TrainResult:
    """Short-horizon curriculum (depths 1-4); the long model continues from it."""
    config = config or TrainConfig()
    torch.manual_seed(config.master_seed)
    policy = CubePolicy(seed=config.master_seed)
    banks = _exact_depth_banks(config.exact_depth_max)
    log: list[dict] = []
    train_phases(config.short_schedule, config.short_move_cap, policy, config,
                 banks, log, checkpoint_dir, tag="short")
    if include_long:
        train_phases(config.long_schedule, config.long_move_cap, policy, config,
                     banks, log, checkpoint_dir, tag="long")
    return TrainResult(policy=policy, log=log)


def greedy_pass_rate(policy: CubePolicy, states: list[np.ndarray], move_cap: int) -> float:
    """Fraction of the given start states solved by argmax rollouts within the cap."""
    from .vecenv import ACTION_PERMS, SOLVED_CODES

    solved = 0
    for start in states:
        state = start.copy()
        for _ in range(move_cap):
            if (state == SOLVED_CODES).all():
                break
            action = int(policy.act_greedy(state[None, :])[0])
            state = state[ACTION_PERMS[action]]
        if (state == SOLVED_CODES).all():
            solved += 1
    return solved / len(states)
