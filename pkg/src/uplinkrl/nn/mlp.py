"""Minimal dense feedforward network with analytic gradients.

The network is a plain container of float64 weight matrices and bias
vectors; forward/backward delegate the per-layer math to the selected
kernel backend. Gradients are computed by hand, there is no autograd.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ShapeError, UsageError
from .backend import ACT_CODES, ACT_LINEAR, kernels


@dataclass
class Grads:
    """Per-layer gradients in the same order as Mlp.weights/biases."""

    weights: list
    biases: list

    def global_norm(self) -> float:
        total = 0.0
        for g in self.weights:
            total += float(np.sum(g * g))
        for g in self.biases:
            total += float(np.sum(g * g))
        return float(np.sqrt(total))


class Mlp:
    """Fully connected network, hidden activations default to relu.

    layer_sizes includes the input width, e.g. (4, 32, 32, 2). The output
    layer is linear unless an explicit activation list is given; squashing
    for bounded actions is the caller's job.
    """

    def __init__(self, layer_sizes, activations=None, *, seed: int = 0):
        sizes = [int(s) for s in layer_sizes]
        if len(sizes) < 2 or any(s <= 0 for s in sizes):
            raise ShapeError(f"layer_sizes must be >=2 positive ints, got {layer_sizes}")
        n_layers = len(sizes) - 1
        if activations is None:
            activations = ["relu"] * (n_layers - 1) + ["linear"]
        if len(activations) != n_layers:
            raise ShapeError(
                f"expected {n_layers} activations, got {len(activations)}"
            )
        unknown = [a for a in activations if a not in ACT_CODES]
        if unknown:
            raise ShapeError(f"unknown activations: {unknown}")

        self.layer_sizes = tuple(sizes)
        self.activations = tuple(activations)
        self._act_codes = [ACT_CODES[a] for a in activations]
        rng = np.random.Generator(np.random.PCG64(seed))
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            limit = np.sqrt(6.0 / (fan_in + fan_out))
            w = rng.uniform(-limit, limit, size=(fan_out, fan_in))
            self.weights.append(np.ascontiguousarray(w))
            self.biases.append(np.zeros(fan_out))
        self._cache: list[np.ndarray] | None = None

    @property
    def in_dim(self) -> int:
        return self.layer_sizes[0]

    @property
    def out_dim(self) -> int:
        return self.layer_sizes[-1]

    def named_params(self):
        """Yield (name, array) pairs, e.g. ('w0', ...), ('b0', ...)."""
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            yield f"w{i}", w
            yield f"b{i}", b

    def forward(self, x: np.ndarray) -> np.ndarray:
        """Single-sample forward pass; x has shape (in_dim,)."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.in_dim,):
            raise ShapeError(f"expected input shape ({self.in_dim},), got {x.shape}")
        return self.forward_batch(x[None, :], keep_cache=False)[0]

    def forward_batch(self, x: np.ndarray, *, keep_cache: bool = False) -> np.ndarray:
        """Batched forward pass; x has shape (B, in_dim).

        With keep_cache=True the per-layer outputs are retained so that a
        following backward() call can run; the cache is replaced on every
        cached forward.
        """
        x = np.ascontiguousarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.in_dim:
            raise ShapeError(f"expected input shape (B, {self.in_dim}), got {x.shape}")
        acts = [x]
        h = x
        for w, b, code in zip(self.weights, self.biases, self._act_codes):
            h = kernels.layer_forward(h, w, b, code)
            acts.append(h)
        self._cache = acts if keep_cache else None
        return h

    def backward(self, x: np.ndarray, output_grad: np.ndarray, *, need_input_grad: bool = False):
        """Backprop the loss gradient at the output through the network.

        `x` must be the input used in the most recent cached forward pass;
        passing anything else is a usage error. Returns Grads, or
        (Grads, input_grad) when need_input_grad is set.
        """
        if self._cache is None:
            raise UsageError("backward() requires a prior forward_batch(keep_cache=True)")
        x = np.asarray(x, dtype=np.float64)
        cached_in = self._cache[0]
        if x.shape != cached_in.shape or not np.array_equal(x, cached_in):
            raise UsageError("backward() input does not match the cached forward input")
        g = np.ascontiguousarray(output_grad, dtype=np.float64)
        if g.shape != self._cache[-1].shape:
            raise ShapeError(
                f"output_grad shape {g.shape} != output shape {self._cache[-1].shape}"
            )
        dws = [None] * len(self.weights)
        dbs = [None] * len(self.biases)
        for i in range(len(self.weights) - 1, -1, -1):
            dw, db, g = kernels.layer_backward(
                g, self._cache[i + 1], self._act_codes[i], self._cache[i], self.weights[i]
            )
            dws[i] = dw
            dbs[i] = db
        grads = Grads(dws, dbs)
        if need_input_grad:
            return grads, g
        return grads

    def copy_from(self, other: "Mlp") -> None:
        """Hard-copy parameters from a same-shaped network."""
        _check_same_shape(self, other)
        for dst, src in zip(self.weights, other.weights):
            np.copyto(dst, src)
        for dst, src in zip(self.biases, other.biases):
            np.copyto(dst, src)

    def clone(self) -> "Mlp":
        """Structural copy with identical parameters (used for target nets)."""
        twin = Mlp(self.layer_sizes, list(self.activations), seed=0)
        twin.copy_from(self)
        return twin


def _check_same_shape(a: Mlp, b: Mlp) -> None:
    if a.layer_sizes != b.layer_sizes:
        raise ShapeError(f"network shapes differ: {a.layer_sizes} vs {b.layer_sizes}")


def polyak_update(target: Mlp, online: Mlp, tau: float) -> None:
    """target <- (1 - tau) * target + tau * online, elementwise.

    tau=1 copies the online network; tau=0 leaves the target unchanged.
    """
    if not 0.0 <= tau <= 1.0:
        raise ShapeError(f"tau must be in [0, 1], got {tau}")
    _check_same_shape(target, online)
    for t, o in zip(target.weights, online.weights):
        t *= 1.0 - tau
        t += tau * o
    for t, o in zip(target.biases, online.biases):
        t *= 1.0 - tau
        t += tau * o
