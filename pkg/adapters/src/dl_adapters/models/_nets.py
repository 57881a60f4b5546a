"""Small torch building blocks shared by the adapter models."""

from __future__ import annotations

import math

import numpy as np
import torch
from torch import nn


def seed_everything(seed: int) -> np.random.Generator:
    torch.manual_seed(seed % (2**63))
    return np.random.default_rng(seed)


def mlp(in_dim: int, hidden: int, out_dim: int, depth: int = 2) -> nn.Sequential:
    layers: list[nn.Module] = []
    width = in_dim
    for _ in range(depth):
        layers += [nn.Linear(width, hidden), nn.ReLU()]
        width = hidden
    layers.append(nn.Linear(width, out_dim))
    return nn.Sequential(*layers)


def apply_output_activations(raw: torch.Tensor, n_numeric: int, cat_sizes: list[int],
                             tau: float = 0.2, hard: bool = False) -> torch.Tensor:
    """tanh on the numeric block, (gumbel-)softmax per categorical block."""
    parts = []
    if n_numeric:
        parts.append(torch.tanh(raw[:, :n_numeric]))
    offset = n_numeric
    for size in cat_sizes:
        block = raw[:, offset : offset + size]
        if hard:
            parts.append(torch.nn.functional.gumbel_softmax(block, tau=tau, hard=True))
        else:
            parts.append(torch.softmax(block / tau, dim=1))
        offset += size
    return torch.cat(parts, dim=1)


class TimeEmbedding(nn.Module):
    """Sinusoidal timestep embedding for the diffusion denoiser."""

    def __init__(self, dim: int):
        super().__init__()
        self.dim = dim

    def forward(self, t: torch.Tensor) -> torch.Tensor:
        half = self.dim // 2
        freqs = torch.exp(-math.log(10_000.0) * torch.arange(half, dtype=torch.float32) / half)
        angles = t.float().unsqueeze(1) * freqs.unsqueeze(0)
        return torch.cat([torch.sin(angles), torch.cos(angles)], dim=1)


def minibatches(array: np.ndarray, batch_size: int, rng: np.random.Generator):
    idx = rng.permutation(array.shape[0])
    for start in range(0, len(idx), batch_size):
        batch = idx[start : start + batch_size]
        if len(batch) > 1:  # single-row batches destabilize norm-free critics
            yield torch.from_numpy(array[batch])
