"""Conditional tabular GAN: WGAN-GP critic plus a categorical condition vector.

Each training step conditions the generator on one categorical column/value
pair drawn from the data (by-frequency), and a cross-entropy term pushes the
generated row to honor the condition; sampling draws conditions from the
empirical frequencies. Tables without categorical columns degrade to a plain
WGAN-GP.
"""

from __future__ import annotations

import numpy as np
import torch

from ..data import MixedEncoder, TableData
from ._nets import apply_output_activations, minibatches, mlp, seed_everything
from .wgan import _gradient_penalty

DEFAULTS = {
    "epochs": 80,
    "batch_size": 128,
    "lr": 2e-4,
    "hidden_dim": 128,
    "embedding_dim": 64,
    "n_critic": 3,
    "gp_weight": 10.0,
    "cond_weight": 1.0,
}


def train_and_sample(data: TableData, n: int, seed: int, hp: dict) -> tuple[np.ndarray, np.ndarray]:
    rng = seed_everything(seed)
    encoder = MixedEncoder(data, scaling="minmax")
    encoded = encoder.encode()
    n_numeric = len(data.numeric_cols)
    cat_sizes = encoder.cat_sizes
    cond_dim = sum(cat_sizes)

    z_dim = hp["embedding_dim"]
    generator = mlp(z_dim + cond_dim, hp["hidden_dim"], encoder.width)
    critic = mlp(encoder.width + cond_dim, hp["hidden_dim"], 1)
    g_opt = torch.optim.Adam(generator.parameters(), lr=hp["lr"], betas=(0.5, 0.9))
    c_opt = torch.optim.Adam(critic.parameters(), lr=hp["lr"], betas=(0.5, 0.9))

    cat_offsets = np.cumsum([n_numeric] + cat_sizes)[:-1] if cat_sizes else np.array([], dtype=int)

    def condition_from_rows(rows: torch.Tensor) -> torch.Tensor:
        """One-hot condition: a random categorical column's value per row."""
        if not cat_sizes:
            return torch.zeros(rows.shape[0], 0)
        cond = torch.zeros(rows.shape[0], cond_dim)
        which = rng.integers(0, len(cat_sizes), size=rows.shape[0])
        base = 0
        for j, size in enumerate(cat_sizes):
            mask = which == j
            if mask.any():
                block = rows[np.where(mask)[0]][:, cat_offsets[j] : cat_offsets[j] + size]
                cond[np.where(mask)[0], base : base + size] = block
            base += size
        return cond

    def cond_loss(fake: torch.Tensor, cond: torch.Tensor) -> torch.Tensor:
        if not cat_sizes:
            return torch.zeros(())
        total = torch.zeros(())
        base = 0
        for j, size in enumerate(cat_sizes):
            cond_block = cond[:, base : base + size]
            active = cond_block.sum(dim=1) > 0
            if active.any():
                logits = fake[:, cat_offsets[j] : cat_offsets[j] + size]
                target = cond_block[active].argmax(dim=1)
                total = total + torch.nn.functional.cross_entropy(logits[active], target)
            base += size
        return total

    def generate(cond: torch.Tensor, activate: bool = True) -> torch.Tensor:
        z = torch.randn(cond.shape[0], z_dim)
        raw = generator(torch.cat([z, cond], dim=1))
        return apply_output_activations(raw, n_numeric, cat_sizes) if activate else raw

    step = 0
    for _ in range(hp["epochs"]):
        for real in minibatches(encoded, hp["batch_size"], rng):
            cond = condition_from_rows(real)
            c_opt.zero_grad()
            fake = generate(cond).detach()
            real_in = torch.cat([real, cond], dim=1)
            fake_in = torch.cat([fake, cond], dim=1)
            loss_c = critic(fake_in).mean() - critic(real_in).mean()
            loss_c = loss_c + hp["gp_weight"] * _gradient_penalty(critic, real_in, fake_in)
            loss_c.backward()
            c_opt.step()
            step += 1
            if step % hp["n_critic"] == 0:
                g_opt.zero_grad()
                raw = generator(torch.cat([torch.randn(real.shape[0], z_dim), cond], dim=1))
                fake = apply_output_activations(raw, n_numeric, cat_sizes)
                loss_g = -critic(torch.cat([fake, cond], dim=1)).mean()
                loss_g = loss_g + hp["cond_weight"] * cond_loss(raw, cond)
                loss_g.backward()
                g_opt.step()

    generator.eval()
    with torch.no_grad():
        if cat_sizes:
            sample_codes = encoder.empirical_code_sampler(rng, n)
            cond = torch.zeros(n, cond_dim)
            which = rng.integers(0, len(cat_sizes), size=n)
            base = 0
            for j, size in enumerate(cat_sizes):
                mask = np.where(which == j)[0]
                cond[mask, base + sample_codes[mask, j]] = 1.0
                base += size
        else:
            cond = torch.zeros(n, 0)
        sampled = generate(cond).numpy()
    return encoder.decode(sampled, rng)
