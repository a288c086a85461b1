"""Adaptive-moment optimizer with gradient clipping.

One optimizer instance is bound to one network. Gradients are clipped by
global norm before the moment update so a single bad batch cannot blow
up the parameters; the clip threshold is deliberately loose.
"""

from __future__ import annotations

import numpy as np

from ..errors import NumericError, ShapeError
from .backend import kernels
from .mlp import Grads, Mlp


class Adam:
    """Adam with bias correction (betas 0.9/0.999, eps 1e-8 by default)."""

    def __init__(
        self,
        net: Mlp,
        lr: float = 1e-3,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
        clip_norm: float = 10.0,
    ):
        if lr <= 0.0:
            raise ShapeError(f"lr must be positive, got {lr}")
        self.net = net
        self.lr = float(lr)
        self.beta1 = float(beta1)
        self.beta2 = float(beta2)
        self.eps = float(eps)
        self.clip_norm = float(clip_norm)
        self.t = 0
        self._m = {name: np.zeros_like(p) for name, p in net.named_params()}
        self._v = {name: np.zeros_like(p) for name, p in net.named_params()}

    def step(self, grads: Grads) -> None:
        """Apply one update in place; raises NumericError on non-finite grads."""
        named = list(self.net.named_params())
        flat_grads = []
        for (name, _), g in zip(named, _interleave(grads)):
            if not np.all(np.isfinite(g)):
                raise NumericError(f"non-finite gradient for parameter {name!r}")
            flat_grads.append(g)

        norm = grads.global_norm()
        scale = 1.0
        if self.clip_norm > 0.0 and norm > self.clip_norm:
            scale = self.clip_norm / norm

        self.t += 1
        for (name, p), g in zip(named, flat_grads):
            if g.shape != p.shape:
                raise ShapeError(f"gradient shape {g.shape} != param shape {p.shape} ({name})")
            g_used = g if scale == 1.0 else g * scale
            kernels.adam_update(
                p.reshape(-1),
                np.ascontiguousarray(g_used, dtype=np.float64).reshape(-1),
                self._m[name].reshape(-1),
                self._v[name].reshape(-1),
                self.t,
                self.lr,
                self.beta1,
                self.beta2,
                self.eps,
            )


def _interleave(grads: Grads):
    for dw, db in zip(grads.weights, grads.biases):
        yield dw
        yield db
