import copy
import random

import numpy as np
import pytest
import torch

from cubelab.cube import MOVES, SOLVED, scramble
from cubelab.rl import (CubePolicy, Episode, NonFiniteGradient, TrainConfig, VecCubeEnv,
                        bank_sampler, collect_episodes, discounted_returns,
                        encode_observation, encode_state, one_hot,
                        reinforce_update, scramble_sampler, train_curriculum)
from cubelab.rl.vecenv import decode_state


def test_one_hot_features():
    v = encode_observation(SOLVED)
    assert v.shape == (324,)
    assert v.sum() == 54
    st, _ = scramble(1, 20)
    assert encode_observation(st).sum() == 54


def test_feature_difference_under_one_move():
    # coordinates differing = 2 * stickers that changed color (40 for generic states)
    rng = random.Random(0)
    seen40 = False
    for i in range(60):
        st, _ = scramble(i, 20)
        move = MOVES[rng.randrange(12)]
        nxt = st.apply(move)
        changed = sum(1 for a, b in zip(st.stickers, nxt.stickers) if a != b)
        diff = int((encode_observation(st) != encode_observation(nxt)).sum())
        assert diff == 2 * changed
        seen40 = seen40 or diff == 40
    assert seen40


def test_vecenv_matches_cube_moves():
    env = VecCubeEnv(4, scramble_sampler(6), move_cap=16, seed=1)
    before = env.states.copy()
    actions = np.array([0, 3, 7, 11])
    env.step(actions)
    for i, a in enumerate(actions):
        expected = decode_state(before[i]).apply(MOVES[a])
        assert decode_state(env.states[i]) == expected


def test_vecenv_reset_on_solve():
    start = SOLVED.apply(MOVES[0])
    env = VecCubeEnv(1, bank_sampler([encode_state(start)]), move_cap=16, seed=2)
    rewards, dones = env.step(np.array([1]))    # MOVES[1] inverts MOVES[0]
    assert rewards[0] == 1.0 and dones[0]
    assert (env.states[0] == encode_state(start)).all()   # resampled from the bank


def test_zero_init_head_gives_uniform_policy():
    policy = CubePolicy(seed=0)
    states = np.stack([encode_state(scramble(i, 8)[0]) for i in range(5)])
    probs = policy.probabilities(torch.from_numpy(one_hot(states))).detach()
    assert torch.allclose(probs, torch.full((5, 12), 1 / 12))
    assert torch.allclose(probs.sum(dim=-1), torch.ones(5), atol=1e-6)


def test_discounted_returns_against_direct_sum():
    rng = np.random.default_rng(3)
    for _ in range(50):
        rewards = rng.normal(size=rng.integers(1, 30)).astype(np.float32)
        gamma = 0.99
        got = discounted_returns(rewards, gamma)
        for t in range(len(rewards)):
            direct = sum(gamma ** (k - t) * float(rewards[k])
                         for k in range(t, len(rewards)))
            assert got[t] == pytest.approx(direct, rel=1e-4, abs=1e-5)


def _log_prob_grads(policy, feats, action):
    logits = policy(feats)
    log_prob = torch.log_softmax(logits, dim=-1)[0, action]
    policy.zero_grad()
    log_prob.backward()
    return log_prob, [p.grad.clone() for p in policy.parameters()]


def test_log_prob_gradient_matches_finite_differences():
    torch.manual_seed(0)
    policy = CubePolicy(seed=3).double()
    with torch.no_grad():
        for p in policy.parameters():
            p.add_(torch.randn_like(p) * 0.05)    # move off the zero head
    state = encode_state(scramble(5, 6)[0])
    feats = torch.from_numpy(one_hot(state[None, :])).double()
    action = 4
    _, grads = _log_prob_grads(policy, feats, action)

    rng = np.random.default_rng(0)
    eps = 1e-6
    checked = 0
    for p, g in zip(policy.parameters(), grads):
        flat = p.data.view(-1)
        gflat = g.view(-1)
        for idx in rng.choice(flat.numel(), size=min(6, flat.numel()), replace=False):
            orig = flat[idx].item()
            flat[idx] = orig + eps
            up = torch.log_softmax(policy(feats), dim=-1)[0, action].item()
            flat[idx] = orig - eps
            down = torch.log_softmax(policy(feats), dim=-1)[0, action].item()
            flat[idx] = orig
            numeric = (up - down) / (2 * eps)
            assert abs(numeric - gflat[idx].item()) < 1e-4
            checked += 1
    assert checked >= 30


def test_reinforce_objective_gradient_matches_finite_differences():
    torch.manual_seed(1)
    policy = CubePolicy(seed=4).double()
    with torch.no_grad():
        for p in policy.parameters():
            p.add_(torch.randn_like(p) * 0.05)
    # a three-step episode with a terminal reward
    states = np.stack([encode_state(scramble(i, 3)[0]) for i in range(3)])
    actions = np.array([2, 7, 11])
    rewards = np.array([0.0, 0.0, 1.0], dtype=np.float32)
    gamma = 0.99
    returns = torch.from_numpy(discounted_returns(rewards, gamma)).double()
    feats = torch.from_numpy(one_hot(states)).double()

    def objective():
        log_probs = torch.log_softmax(policy(feats), dim=-1)
        chosen = log_probs.gather(1, torch.from_numpy(actions)[:, None]).squeeze(1)
        return (chosen * returns).sum()

    loss = objective()
    policy.zero_grad()
    loss.backward()
    rng = np.random.default_rng(1)
    eps = 1e-6
    for p in policy.parameters():
        flat = p.data.view(-1)
        gflat = p.grad.view(-1)
        for idx in rng.choice(flat.numel(), size=min(4, flat.numel()), replace=False):
            orig = flat[idx].item()
            flat[idx] = orig + eps
            up = objective().item()
            flat[idx] = orig - eps
            down = objective().item()
            flat[idx] = orig
            numeric = (up - down) / (2 * eps)
            analytic = gflat[idx].item()
            scale = max(abs(numeric), abs(analytic), 1e-8)
            assert abs(numeric - analytic) / scale < 1e-3


def test_update_increases_rewarded_action_probability():
    policy = CubePolicy(seed=5)
    optimizer = torch.optim.Adam(policy.parameters(), lr=5e-4)
    state = encode_state(SOLVED.apply(MOVES[3]))
    action = 2     # MOVES[2].inverse() is MOVES[3]... any fixed action works
    episodes = [Episode(state[None, :], np.array([action]),
                        np.array([1.0], dtype=np.float32)) for _ in range(32)]
    feats = torch.from_numpy(one_hot(state[None, :]))
    before = policy.probabilities(feats).detach()[0, action].item()
    reinforce_update(policy, optimizer, episodes, gamma=0.99)
    after = policy.probabilities(feats).detach()[0, action].item()
    assert after > before


def test_zero_reward_batch_leaves_params_unchanged():
    policy = CubePolicy(seed=6)
    optimizer = torch.optim.Adam(policy.parameters(), lr=5e-4)
    before = copy.deepcopy(policy.state_dict())
    state = encode_state(scramble(2, 4)[0])
    episodes = [Episode(state[None, :], np.array([1]),
                        np.array([0.0], dtype=np.float32))]
    reinforce_update(policy, optimizer, episodes, gamma=0.99)
    for key, value in policy.state_dict().items():
        assert torch.equal(value, before[key]), key


def test_non_finite_gradient_aborts_update():
    policy = CubePolicy(seed=7)
    optimizer = torch.optim.Adam(policy.parameters(), lr=5e-4)
    before = copy.deepcopy(policy.state_dict())
    state = encode_state(scramble(3, 4)[0])
    bad = [Episode(state[None, :], np.array([0]),
                   np.array([np.inf], dtype=np.float32))]
    with pytest.raises(NonFiniteGradient):
        reinforce_update(policy, optimizer, bad, gamma=0.99)
    for key, value in policy.state_dict().items():
        assert torch.equal(value, before[key]), key


def test_collection_counts_parallel_steps():
    policy = CubePolicy(seed=8)
    env = VecCubeEnv(8, scramble_sampler(1), move_cap=4, seed=3)
    gen = torch.Generator().manual_seed(0)
    episodes, steps = collect_episodes(policy, env, n_episodes=16, gen=gen,
                                       rollout_steps=64)
    assert steps <= 64
    assert len(episodes) >= 16
    for ep in episodes:
        assert 1 <= len(ep.rewards) <= 4


def test_training_is_deterministic():
    cfg = TrainConfig(short_schedule=((1, 1500),), master_seed=11)
    logs = []
    for _ in range(2):
        result = train_curriculum(cfg)
        logs.append([(e["timesteps"], round(e.get("loss", 0.0), 12),
                      e.get("episodes")) for e in result.log])
    assert logs[0] == logs[1]


def test_curriculum_schedule_arithmetic():
    # the quadratic reading gives 40k * k^2; the configured endpoints are
    # 40k (depth 1) and 320k (depth 4), which the geometric default matches
    quadratic = [40_000 * k * k for k in (1, 2, 3, 4)]
    assert quadratic == [40_000, 160_000, 360_000, 640_000]
    defaults = TrainConfig().short_schedule
    assert defaults[0] == (1, 40_000)
    assert defaults[-1] == (4, 320_000)
    ratios = [b[1] / a[1] for a, b in zip(defaults, defaults[1:])]
    assert all(r == 2 for r in ratios)


def test_checkpoint_round_trip(tmp_path):
    from cubelab.rl import load_checkpoint, save_checkpoint

    policy = CubePolicy(seed=9)
    with torch.no_grad():
        for p in policy.parameters():
            p.add_(torch.randn_like(p) * 0.01)
    save_checkpoint(policy, tmp_path / "p.pt", {"note": "test"})
    assert (tmp_path / "p.pt.sha256").exists()
    loaded, meta = load_checkpoint(tmp_path / "p.pt")
    assert meta["note"] == "test"
    states = np.stack([encode_state(scramble(i, 5)[0]) for i in range(4)])
    feats = torch.from_numpy(one_hot(states))
    assert torch.equal(policy(feats), loaded(feats))


def test_evaluate_policy_solved_case_and_cap_zero(tables, pdbs):
    from cubelab.rl import evaluate_policy
    from cubelab.tasks import TaskGenerator

    gen = TaskGenerator(tables, pdbs)
    solved_case = gen.generate_case(0, seed=1)
    deep_case = gen.generate_case(3, seed=2)
    policy = CubePolicy(seed=10)
    records, report = evaluate_policy(policy, [solved_case], move_cap=16)
    assert report.pass_rate == 1.0 and records[0].moves_made == 0
    records, report = evaluate_policy(policy, [deep_case], move_cap=0)
    assert report.pass_rate == 0.0
