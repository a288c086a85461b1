"""Shared plumbing for the learning agents."""

from __future__ import annotations

import numpy as np

from ..errors import NumericError, ShapeError


class ActionBounds:
    """Affine map between tanh space [-1, 1]^d and a bounded action box."""

    def __init__(self, low, high):
        self.low = np.asarray(low, dtype=np.float64)
        self.high = np.asarray(high, dtype=np.float64)
        if self.low.shape != self.high.shape or self.low.ndim != 1:
            raise ShapeError("bounds must be matching 1-d arrays")
        if np.any(self.high <= self.low):
            raise ShapeError("each high bound must exceed its low bound")
        self.center = 0.5 * (self.low + self.high)
        self.radius = 0.5 * (self.high - self.low)

    @property
    def dim(self) -> int:
        return self.low.shape[0]

    def squash(self, t):
        """tanh-space value -> action; works on single rows or batches."""
        return self.center + self.radius * np.asarray(t)

    def clip(self, a):
        return np.clip(a, self.low, self.high)


def check_finite(value: float, what: str, context: dict) -> float:
    """Raise a diagnostic NumericError when a loss or statistic blows up."""
    if not np.isfinite(value):
        detail = ", ".join(f"{k}={v}" for k, v in context.items())
        raise NumericError(f"{what} is not finite ({value}); {detail}")
    return float(value)
