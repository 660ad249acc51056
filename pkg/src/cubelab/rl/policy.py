"""Policy network: five fully connected layers, 256 units, ReLU between.

Input is the 324-wide one-hot sticker encoding, output the 12 action logits.
The head starts zero-initialized so the untrained policy is exactly uniform.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np
import torch
from torch import nn

from ..cube import CubeState
from .vecenv import encode_state, one_hot

INPUT_WIDTH = 54 * 6
N_ACTIONS = 12
HIDDEN = 256


class CubePolicy(nn.Module):
    def __init__(self, seed: int = 0):
        super().__init__()
        gen = torch.Generator().manual_seed(seed)
        layers: list[nn.Module] = []
        widths = [INPUT_WIDTH, HIDDEN, HIDDEN, HIDDEN, HIDDEN, N_ACTIONS]
        for i, (a, b) in enumerate(zip(widths[:-1], widths[1:])):
            linear = nn.Linear(a, b)
            with torch.no_grad():
                if i == len(widths) - 2:
                    linear.weight.zero_()
                    linear.bias.zero_()
                else:
                    nn.init.kaiming_uniform_(linear.weight, a=5**0.5, generator=gen)
                    bound = 1 / a**0.5
                    linear.bias.uniform_(-bound, bound, generator=gen)
            layers.append(linear)
            if i < len(widths) - 2:
                layers.append(nn.ReLU())
        self.net = nn.Sequential(*layers)

    def forward(self, features: torch.Tensor) -> torch.Tensor:
        return self.net(features)

    def probabilities(self, features: torch.Tensor) -> torch.Tensor:
        return torch.softmax(self.forward(features), dim=-1)

    def act_greedy(self, states: np.ndarray) -> np.ndarray:
        with torch.no_grad():
            logits = self.forward(torch.from_numpy(one_hot(states)))
        return logits.argmax(dim=-1).numpy()

    def act_sampled(self, states: np.ndarray, gen: torch.Generator) -> np.ndarray:
        with torch.no_grad():
            probs = self.probabilities(torch.from_numpy(one_hot(states)))
        return torch.multinomial(probs, 1, generator=gen).squeeze(1).numpy()


def encode_observation(state: CubeState) -> np.ndarray:
    """One-hot feature vector of a single state (54 ones out of 324)."""
    return one_hot(encode_state(state)[None, :])[0]


def save_checkpoint(policy: CubePolicy, path: Path, metadata: dict | None = None) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    blob = {"state_dict": policy.state_dict(), "metadata": metadata or {}}
    torch.save(blob, path)
    digest = hashlib.sha256(path.read_bytes()).hexdigest()
    path.with_suffix(path.suffix + ".sha256").write_text(
        json.dumps({"sha256": digest, "metadata": metadata or {}}) + "\n")


def load_checkpoint(path: Path) -> tuple[CubePolicy, dict]:
    blob = torch.load(Path(path), map_location="cpu", weights_only=True)
    policy = CubePolicy()
    policy.load_state_dict(blob["state_dict"])
    return policy, blob.get("metadata", {})
