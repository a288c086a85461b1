"""Numpy reference kernels for the dense-layer math.

Same contract as the compiled module in _fast.pyx; backend.py picks
whichever is importable. Activation codes: 0=linear, 1=relu, 2=tanh.
All arrays are float64 and C-contiguous.
"""

from __future__ import annotations

import numpy as np

NAME = "pure"

ACT_LINEAR = 0
ACT_RELU = 1
ACT_TANH = 2


def layer_forward(a_prev: np.ndarray, w: np.ndarray, b: np.ndarray, act: int) -> np.ndarray:
    """Affine map plus activation: act(a_prev @ w.T + b), shape (B, out)."""
    z = a_prev @ w.T + b
    if act == ACT_RELU:
        np.maximum(z, 0.0, out=z)
    elif act == ACT_TANH:
        np.tanh(z, out=z)
    return z


def layer_backward(
    g: np.ndarray, a: np.ndarray, act: int, a_prev: np.ndarray, w: np.ndarray
):
    """Backprop one layer given the layer's post-activation output `a`.

    Returns (dw, db, g_prev). Derivatives are taken from the activation
    output, which is enough for linear, relu and tanh.
    """
    if act == ACT_RELU:
        dz = g * (a > 0.0)
    elif act == ACT_TANH:
        dz = g * (1.0 - a * a)
    else:
        dz = g
    dw = dz.T @ a_prev
    db = dz.sum(axis=0)
    g_prev = dz @ w
    return dw, db, g_prev


def adam_update(
    p: np.ndarray,
    g: np.ndarray,
    m: np.ndarray,
    v: np.ndarray,
    t: int,
    lr: float,
    beta1: float,
    beta2: float,
    eps: float,
) -> None:
    """In-place adaptive-moment update with bias correction at step t >= 1."""
    m *= beta1
    m += (1.0 - beta1) * g
    v *= beta2
    v += (1.0 - beta2) * (g * g)
    m_hat = m / (1.0 - beta1**t)
    v_hat = v / (1.0 - beta2**t)
    p -= lr * m_hat / (np.sqrt(v_hat) + eps)
