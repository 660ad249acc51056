from .evaluate import evaluate_policy
from .policy import CubePolicy, encode_observation, load_checkpoint, save_checkpoint
from .reinforce import (Episode, NonFiniteGradient, TrainConfig, TrainResult,
                        collect_episodes, discounted_returns, greedy_pass_rate,
                        reinforce_update, train_curriculum)
from .vecenv import VecCubeEnv, bank_sampler, encode_state, one_hot, scramble_sampler

__all__ = [
    "CubePolicy", "Episode", "NonFiniteGradient", "TrainConfig", "TrainResult",
    "VecCubeEnv", "bank_sampler", "collect_episodes", "discounted_returns",
    "encode_observation", "encode_state", "evaluate_policy", "greedy_pass_rate",
    "load_checkpoint", "one_hot", "reinforce_update", "save_checkpoint",
    "scramble_sampler", "train_curriculum",
]
