"""Randomized SVD: Gaussian range finder with oversampling and optional
power iterations, truncation helpers, and the quantized single-matrix
low-rank approximation.
"""

import json
import os
from dataclasses import dataclass

import numpy as np

from . import matcore, quant
from .errors import FormatError, ParameterError
from .matcore import SvdFactors, as_matrix, gemm, oracle_svd

_SKETCH_TAG = 0x534B

DEFAULT_OVERSAMPLE = 10


@dataclass(frozen=True)
class RsvdParams:
    """Rank target, power iteration count, oversampling and sketch seed."""

    rank: int
    power_iters: int = 0
    oversample: int = DEFAULT_OVERSAMPLE
    seed: int = 0

    def __post_init__(self):
        if self.rank < 1:
            raise ParameterError(f"rank must be >= 1, got {self.rank}")
        if self.power_iters < 0:
            raise ParameterError("power_iters must be >= 0")
        if self.oversample < 0:
            raise ParameterError("oversample must be >= 0")


def _sketch_width(shape, params):
    lo = min(shape)
    if params.rank > lo:
        raise ParameterError(f"rank {params.rank} exceeds min dim {lo} of {shape}")
    # oversampling is clipped so rank + oversample always fits
    return min(params.rank + params.oversample, lo)


def range_finder(a, params):
    """Orthonormal Q (m x (rank + oversample)) approximating the range of A.

    Q = orth((A A^T)^q A Omega) with a seeded Gaussian sketch Omega and
    re-orthonormalization between power iterations.
    """
    a = as_matrix(a)
    m, n = a.shape
    width = _sketch_width(a.shape, params)
    omega = matcore._rng(params.seed, _SKETCH_TAG, n, width).standard_normal((n, width))
    y = gemm(a, omega)
    q = np.linalg.qr(y)[0]
    at = np.ascontiguousarray(a.T)
    for _ in range(params.power_iters):
        z = gemm(at, np.ascontiguousarray(q))
        qz = np.linalg.qr(z)[0]
        y = gemm(a, np.ascontiguousarray(qz))
        q = np.linalg.qr(y)[0]
    return np.ascontiguousarray(q)


def rsvd(a, params):
    """Randomized thin SVD truncated to params.rank.

    Projects A onto the sketched range, factorizes the small projected
    matrix with the dense oracle, lifts the left factor back, and keeps the
    top `rank` triplets. Deterministic for fixed params.
    """
    a = as_matrix(a)
    q = range_finder(a, params)
    b = gemm(np.ascontiguousarray(q.T), a)  # (rank + oversample) x n
    small = oracle_svd(b)
    u = gemm(q, small.u)
    full = SvdFactors(u=u, sigma=small.sigma, v=small.v)
    return truncate_svd(full, params.rank)


def truncate_svd(factors, rank):
    """Keep the top-`rank` singular triplets."""
    if rank > factors.sigma.shape[0]:
        raise ParameterError(
            f"rank {rank} exceeds factorization width {factors.sigma.shape[0]}"
        )
    return SvdFactors(
        u=np.ascontiguousarray(factors.u[:, :rank]),
        sigma=factors.sigma[:rank].copy(),
        v=np.ascontiguousarray(factors.v[:, :rank]),
    )


def quantized_svd_approx(a, rank, bits_u, bits_v):
    """Rank-`rank` approximation with both factors quantized.

    The left factor is the singular-value-scaled U_r, the right factor is
    V_r; each is quantized at its own bit budget. Returns the two
    QuantizedMatrix factors and the dequantized reconstruction
    dequant(U') @ dequant(V')^T.
    """
    a = as_matrix(a)
    if rank > min(a.shape):
        raise ParameterError(f"rank {rank} exceeds min dim {min(a.shape)}")
    f = truncate_svd(oracle_svd(a), rank)
    u_scaled = np.ascontiguousarray(f.u * f.sigma)
    qu = quant.quantize(u_scaled, bits_u)
    qv = quant.quantize(f.v, bits_v)
    reconstruction = gemm(quant.dequantize(qu), np.ascontiguousarray(quant.dequantize(qv).T))
    return qu, qv, reconstruction


# ---------------------------------------------------------------------------
# factor serialization: three LRMM files plus a JSON manifest


def save_svd_factors(factors, directory, prefix="factors"):
    """Write u/sigma/v as LRMM files plus a manifest.json in `directory`."""
    os.makedirs(directory, exist_ok=True)
    paths = {
        "u": f"{prefix}_u.lrmm",
        "sigma": f"{prefix}_sigma.lrmm",
        "v": f"{prefix}_v.lrmm",
    }
    matcore.save_matrix(factors.u, os.path.join(directory, paths["u"]))
    matcore.save_matrix(factors.sigma.reshape(-1, 1), os.path.join(directory, paths["sigma"]))
    matcore.save_matrix(factors.v, os.path.join(directory, paths["v"]))
    manifest = {
        "m": factors.u.shape[0],
        "n": factors.v.shape[0],
        "r": int(factors.sigma.shape[0]),
        "paths": paths,
    }
    manifest_path = os.path.join(directory, "manifest.json")
    with open(manifest_path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest_path


def load_svd_factors(directory):
    """Read factors written by save_svd_factors."""
    with open(os.path.join(directory, "manifest.json")) as fh:
        manifest = json.load(fh)
    try:
        paths = manifest["paths"]
        u = matcore.load_matrix(os.path.join(directory, paths["u"]))
        sigma = matcore.load_matrix(os.path.join(directory, paths["sigma"]))[:, 0]
        v = matcore.load_matrix(os.path.join(directory, paths["v"]))
    except KeyError as exc:
        raise FormatError(f"manifest missing key {exc}", 0) from None
    f = SvdFactors(u=u, sigma=sigma, v=v)
    if f.shape != (manifest["m"], manifest["n"]) or f.sigma.shape[0] != manifest["r"]:
        raise FormatError("manifest dims disagree with factor files", 0)
    return f
