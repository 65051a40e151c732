"""Kernel backend selection.

The compiled Cython core is preferred when importable; otherwise the NumPy
fallback in `_pure` is used. Set LRAMM_PURE_PYTHON=1 to force the fallback
(used by the backend benchmark and tests).
"""

import importlib
import os

_force_pure = os.environ.get("LRAMM_PURE_PYTHON", "").strip().lower() in {"1", "true", "yes"}

_core = None
if not _force_pure:
    try:
        _core = importlib.import_module("._core", __name__)
    except ImportError:
        _core = None

if _core is not None:
    from ._jacobi import jacobi_svd as svd

    BACKEND = "compiled"
    matmul = _core.matmul
    imatmul = _core.imatmul
    scale_round_clip = _core.scale_round_clip
else:
    from . import _pure

    BACKEND = "python"
    matmul = _pure.matmul
    imatmul = _pure.imatmul
    scale_round_clip = _pure.scale_round_clip
    svd = _pure.svd


def backend_name():
    """Name of the active kernel backend: 'compiled' or 'python'."""
    return BACKEND
