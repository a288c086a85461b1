"""Kernel backend selection.

Imports the compiled extension when it is available, otherwise the numpy
reference kernels. Set UPLINKRL_BACKEND=pure to force the fallback (used
by the equivalence tests and the benchmark).
"""

from __future__ import annotations

import os

if os.environ.get("UPLINKRL_BACKEND", "").strip().lower() == "pure":
    from . import _pure as kernels
else:
    try:
        from . import _fast as kernels  # type: ignore[no-redef]
    except ImportError:
        from . import _pure as kernels  # type: ignore[no-redef]

ACT_LINEAR = kernels.ACT_LINEAR
ACT_RELU = kernels.ACT_RELU
ACT_TANH = kernels.ACT_TANH

ACT_CODES = {"linear": ACT_LINEAR, "relu": ACT_RELU, "tanh": ACT_TANH}


def backend_name() -> str:
    """Name of the active kernel backend: 'fast' or 'pure'."""
    return kernels.NAME
