"""Tabular variational autoencoder: gaussian numeric head, softmax categorical heads."""

from __future__ import annotations

import numpy as np
import torch
from torch import nn

from ..data import MixedEncoder, TableData
from ._nets import minibatches, mlp, seed_everything

DEFAULTS = {
    "epochs": 150,
    "batch_size": 128,
    "lr": 1e-3,
    "hidden_dim": 128,
    "latent_dim": 32,
}


class _Tvae(nn.Module):
    def __init__(self, width: int, hidden: int, latent: int, n_numeric: int, cat_sizes: list[int]):
        super().__init__()
        self.encoder = mlp(width, hidden, 2 * latent)
        self.decoder = mlp(latent, hidden, width)
        self.log_sigma = nn.Parameter(torch.zeros(n_numeric))
        self.latent = latent
        self.n_numeric = n_numeric
        self.cat_sizes = cat_sizes

    def forward(self, x):
        stats = self.encoder(x)
        mu, logvar = stats[:, : self.latent], stats[:, self.latent :]
        std = torch.exp(0.5 * logvar)
        z = mu + std * torch.randn_like(std)
        return self.decoder(z), mu, logvar

    def loss(self, x, out, mu, logvar):
        recon = torch.zeros(())
        if self.n_numeric:
            diff = x[:, : self.n_numeric] - out[:, : self.n_numeric]
            sigma2 = torch.exp(2.0 * self.log_sigma)
            recon = recon + 0.5 * ((diff**2) / sigma2 + 2.0 * self.log_sigma).sum(dim=1).mean()
        offset = self.n_numeric
        for size in self.cat_sizes:
            logits = out[:, offset : offset + size]
            target = x[:, offset : offset + size].argmax(dim=1)
            recon = recon + nn.functional.cross_entropy(logits, target, reduction="mean")
            offset += size
        kld = -0.5 * (1 + logvar - mu.pow(2) - logvar.exp()).sum(dim=1).mean()
        return recon + kld


def train_and_sample(data: TableData, n: int, seed: int, hp: dict) -> tuple[np.ndarray, np.ndarray]:
    rng = seed_everything(seed)
    encoder = MixedEncoder(data, scaling="zscore")
    encoded = encoder.encode()

    model = _Tvae(encoder.width, hp["hidden_dim"], hp["latent_dim"],
                  len(data.numeric_cols), encoder.cat_sizes)
    opt = torch.optim.Adam(model.parameters(), lr=hp["lr"])
    for _ in range(hp["epochs"]):
        for batch in minibatches(encoded, hp["batch_size"], rng):
            opt.zero_grad()
            out, mu, logvar = model(batch)
            loss = model.loss(batch, out, mu, logvar)
            loss.backward()
            opt.step()

    model.eval()
    with torch.no_grad():
        z = torch.randn(n, hp["latent_dim"])
        raw = model.decoder(z)
        if model.n_numeric:  # sample the gaussian heads, not just their means
            noise = torch.randn(n, model.n_numeric) * torch.exp(model.log_sigma)
            raw[:, : model.n_numeric] += noise
        sampled = raw.numpy()
    return encoder.decode(sampled, rng)
