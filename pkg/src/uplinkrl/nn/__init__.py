"""Neural substrate: dense networks, optimizer, replay memory.

The per-layer kernels live in a compiled extension with a numpy fallback;
see backend.backend_name() for which one is active.
"""

from .backend import backend_name
from .mlp import Grads, Mlp, polyak_update
from .optim import Adam
from .replay import Batch, ReplayBuffer

__all__ = [
    "Adam",
    "Batch",
    "Grads",
    "Mlp",
    "ReplayBuffer",
    "backend_name",
    "polyak_update",
]
