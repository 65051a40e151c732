"""One-sided Jacobi SVD driver around the compiled rotation sweeps."""

import numpy as np

from . import _core

# Relative off-diagonal threshold for sweep convergence. With quadratic
# Jacobi convergence this yields reconstruction residuals well below the
# 1e-10 * ||A||_F oracle contract.
_TOL = 1e-13
_MAX_SWEEPS = 60


def jacobi_svd(a):
    """Full thin SVD of a dense float64 matrix.

    Returns (u, sigma, v): u is m x t, v is n x t with orthonormal columns,
    sigma descending, t = min(m, n). Columns belonging to numerically zero
    singular values are replaced by an orthonormal completion so u stays
    orthonormal even for rank-deficient input.
    """
    w = np.array(a, dtype=np.float64, order="C", copy=True)
    m, n = w.shape
    transposed = m < n
    if transposed:
        w = np.ascontiguousarray(w.T)
        m, n = n, m

    v = np.eye(n, dtype=np.float64)
    sweeps = _core.jacobi_sweeps(w, v, _TOL, _MAX_SWEEPS)
    if sweeps < 0:
        raise RuntimeError(f"jacobi sweeps did not converge within {_MAX_SWEEPS}")

    sigma = np.sqrt(np.einsum("ij,ij->j", w, w))
    order = np.argsort(-sigma, kind="stable")
    sigma = sigma[order]
    w = w[:, order]
    v = np.ascontiguousarray(v[:, order])

    cutoff = sigma[0] * 1e-12 if sigma[0] > 0 else 0.0
    good = sigma > cutoff
    u = np.empty_like(w)
    u[:, good] = w[:, good] / sigma[good]
    if not good.all():
        _complete_orthonormal(u, good)
    u = np.ascontiguousarray(u)

    if transposed:
        u, v = v, u
    return u, sigma, v


def _complete_orthonormal(u, good):
    """Fill the not-good columns of u with unit vectors orthogonal to the rest."""
    m = u.shape[0]
    basis = [u[:, j] for j in np.nonzero(good)[0]]
    cand = 0
    for j in np.nonzero(~good)[0]:
        while True:
            if cand >= m:
                raise RuntimeError("orthonormal completion exhausted basis vectors")
            w = np.zeros(m)
            w[cand] = 1.0
            cand += 1
            for _ in range(2):  # re-orthogonalize for stability
                for b in basis:
                    w -= (b @ w) * b
            norm = np.sqrt(w @ w)
            if norm > 1e-8:
                w /= norm
                break
        u[:, j] = w
        basis.append(w)
