"""NumPy fallback kernels, used when the compiled extension is unavailable.

Semantics match the compiled core (same contracts and tolerances); bitwise
output may differ because the float GEMM delegates to the platform BLAS.
"""

import numpy as np


def matmul(a, b):
    """Plain float64 product A @ B."""
    if a.shape[1] != b.shape[0]:
        raise ValueError("inner dimensions differ")
    return a @ b


def imatmul(a, b):
    """Exact integer product with 64-bit accumulation."""
    if a.shape[1] != b.shape[0]:
        raise ValueError("inner dimensions differ")
    return a.astype(np.int64) @ b.astype(np.int64)


def scale_round_clip(a, scale, cap):
    """Round scale*a to nearest even integer, clamped to [-cap, cap]."""
    return np.clip(np.rint(a * scale), -cap, cap).astype(np.int32)


def svd(a):
    """Thin SVD via LAPACK, equivalent to the compiled Jacobi oracle.

    Returns (u, sigma, v) with orthonormal columns and sigma descending.
    """
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    return np.ascontiguousarray(u), s, np.ascontiguousarray(vh.T)
