# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels for the dense-layer math.

Mirrors _pure.py exactly. Matrix products go through numpy's BLAS (hand
loops lose badly there); the wins over the reference kernels come from
fusing the elementwise tails into single passes with no temporaries:
bias + activation after the forward product, the activation derivative
before the backward products, and the whole adaptive-moment update.
Activation codes: 0=linear, 1=relu, 2=tanh.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()

NAME = "fast"

ACT_LINEAR = 0
ACT_RELU = 1
ACT_TANH = 2


def layer_forward(object a_prev, object w, object b, int act):
    """Affine map plus activation: act(a_prev @ w.T + b), shape (B, out)."""
    z_arr = np.matmul(a_prev, np.transpose(w))
    cdef double[:, ::1] z = z_arr
    cdef double[::1] bias = b
    cdef Py_ssize_t n = z.shape[0]
    cdef Py_ssize_t d_out = z.shape[1]
    cdef Py_ssize_t i, j
    cdef double acc
    for i in range(n):
        for j in range(d_out):
            acc = z[i, j] + bias[j]
            if act == 1 and acc < 0.0:
                acc = 0.0
            z[i, j] = acc
    if act == 2:
        # numpy's tanh, not libm's: keeps the two backends bit-identical
        np.tanh(z_arr, out=z_arr)
    return z_arr


def layer_backward(object g, object a, int act, object a_prev, object w):
    """Backprop one layer; returns (dw, db, g_prev), see _pure.layer_backward."""
    cdef double[:, ::1] gv = g
    cdef double[:, ::1] av = a
    cdef Py_ssize_t n = gv.shape[0]
    cdef Py_ssize_t d_out = gv.shape[1]
    dz_arr = np.empty((n, d_out), dtype=np.float64)
    cdef double[:, ::1] dz = dz_arr
    cdef Py_ssize_t i, j
    cdef double d
    for i in range(n):
        for j in range(d_out):
            d = gv[i, j]
            if act == 1:
                if av[i, j] <= 0.0:
                    d = 0.0
            elif act == 2:
                d = d * (1.0 - av[i, j] * av[i, j])
            dz[i, j] = d
    dw_arr = np.matmul(np.transpose(dz_arr), a_prev)
    db_arr = np.sum(dz_arr, axis=0)
    gp_arr = np.matmul(dz_arr, w)
    return dw_arr, db_arr, gp_arr


def adam_update(double[::1] p, double[::1] g, double[::1] m, double[::1] v,
                int t, double lr, double beta1, double beta2, double eps):
    """In-place adaptive-moment update with bias correction at step t >= 1."""
    cdef Py_ssize_t n = p.shape[0]
    cdef double c1 = 1.0 - beta1 ** t
    cdef double c2 = 1.0 - beta2 ** t
    cdef Py_ssize_t i
    cdef double mh, vh
    for i in range(n):
        m[i] = beta1 * m[i] + (1.0 - beta1) * g[i]
        v[i] = beta2 * v[i] + (1.0 - beta2) * (g[i] * g[i])
        mh = m[i] / c1
        vh = v[i] / c2
        p[i] -= lr * mh / (sqrt(vh) + eps)
