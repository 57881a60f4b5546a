"""Wasserstein GAN with gradient penalty over the mixed-type encoding."""

from __future__ import annotations

import numpy as np
import torch
from torch import autograd

from ..data import MixedEncoder, TableData
from ._nets import apply_output_activations, minibatches, mlp, seed_everything

DEFAULTS = {
    "epochs": 80,
    "batch_size": 128,
    "lr": 2e-4,
    "hidden_dim": 128,
    "embedding_dim": 64,
    "n_critic": 3,
    "gp_weight": 10.0,
}


def _gradient_penalty(critic, real, fake):
    alpha = torch.rand(real.shape[0], 1)
    mixed = alpha * real + (1 - alpha) * fake
    mixed.requires_grad_(True)
    score = critic(mixed).sum()
    (grad,) = autograd.grad(score, mixed, create_graph=True)
    return ((grad.norm(2, dim=1) - 1.0) ** 2).mean()


def train_and_sample(data: TableData, n: int, seed: int, hp: dict) -> tuple[np.ndarray, np.ndarray]:
    rng = seed_everything(seed)
    encoder = MixedEncoder(data, scaling="minmax")
    encoded = encoder.encode()
    n_numeric = len(data.numeric_cols)

    z_dim = hp["embedding_dim"]
    generator = mlp(z_dim, hp["hidden_dim"], encoder.width)
    critic = mlp(encoder.width, hp["hidden_dim"], 1)
    g_opt = torch.optim.Adam(generator.parameters(), lr=hp["lr"], betas=(0.5, 0.9))
    c_opt = torch.optim.Adam(critic.parameters(), lr=hp["lr"], betas=(0.5, 0.9))

    def generate(batch: int) -> torch.Tensor:
        z = torch.randn(batch, z_dim)
        return apply_output_activations(generator(z), n_numeric, encoder.cat_sizes)

    step = 0
    for _ in range(hp["epochs"]):
        for real in minibatches(encoded, hp["batch_size"], rng):
            c_opt.zero_grad()
            fake = generate(real.shape[0]).detach()
            loss_c = critic(fake).mean() - critic(real).mean()
            loss_c = loss_c + hp["gp_weight"] * _gradient_penalty(critic, real, fake)
            loss_c.backward()
            c_opt.step()
            step += 1
            if step % hp["n_critic"] == 0:
                g_opt.zero_grad()
                loss_g = -critic(generate(real.shape[0])).mean()
                loss_g.backward()
                g_opt.step()

    generator.eval()
    with torch.no_grad():
        sampled = generate(n).numpy()
    return encoder.decode(sampled, rng)
