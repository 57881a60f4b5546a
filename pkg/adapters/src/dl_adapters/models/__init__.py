from . import ctgan, diffusion, tvae, wgan

__all__ = ["ctgan", "diffusion", "tvae", "wgan"]
