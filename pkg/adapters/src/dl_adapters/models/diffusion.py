"""Gaussian diffusion over embedded mixed-type rows (financial-diffusion style).

Numeric columns are standardized and categorical columns one-hot embedded
into one continuous vector; a denoising MLP with sinusoidal time embeddings
is trained on the usual noise-prediction objective, and sampling runs the
reverse chain from pure noise. Categories decode by argmax.
"""

from __future__ import annotations

import numpy as np
import torch
from torch import nn

from ..data import MixedEncoder, TableData
from ._nets import TimeEmbedding, minibatches, mlp, seed_everything

DEFAULTS = {
    "epochs": 200,
    "batch_size": 128,
    "lr": 1e-3,
    "hidden_dim": 128,
    "steps": 100,
    "time_dim": 32,
}


class _Denoiser(nn.Module):
    def __init__(self, width: int, hidden: int, time_dim: int):
        super().__init__()
        self.time = TimeEmbedding(time_dim)
        self.net = mlp(width + time_dim, hidden, width)

    def forward(self, x, t):
        return self.net(torch.cat([x, self.time(t)], dim=1))


def train_and_sample(data: TableData, n: int, seed: int, hp: dict) -> tuple[np.ndarray, np.ndarray]:
    rng = seed_everything(seed)
    encoder = MixedEncoder(data, scaling="zscore")
    encoded = encoder.encode()
    steps = hp["steps"]

    betas = torch.linspace(1e-4, 0.02, steps)
    alphas = 1.0 - betas
    alpha_bar = torch.cumprod(alphas, dim=0)

    model = _Denoiser(encoder.width, hp["hidden_dim"], hp["time_dim"])
    opt = torch.optim.Adam(model.parameters(), lr=hp["lr"])
    for _ in range(hp["epochs"]):
        for x0 in minibatches(encoded, hp["batch_size"], rng):
            t = torch.randint(0, steps, (x0.shape[0],))
            noise = torch.randn_like(x0)
            ab = alpha_bar[t].unsqueeze(1)
            xt = torch.sqrt(ab) * x0 + torch.sqrt(1.0 - ab) * noise
            opt.zero_grad()
            loss = ((model(xt, t) - noise) ** 2).mean()
            loss.backward()
            opt.step()

    model.eval()
    with torch.no_grad():
        x = torch.randn(n, encoder.width)
        for t in reversed(range(steps)):
            t_vec = torch.full((n,), t, dtype=torch.long)
            predicted = model(x, t_vec)
            coef = betas[t] / torch.sqrt(1.0 - alpha_bar[t])
            mean = (x - coef * predicted) / torch.sqrt(alphas[t])
            if t > 0:
                x = mean + torch.sqrt(betas[t]) * torch.randn_like(x)
            else:
                x = mean
        sampled = x.numpy()
    return encoder.decode(sampled, rng)
