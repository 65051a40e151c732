"""Closed-form evaluators for the error bounds of every approximation stage.

These consume singular values (ideally from the SVD oracle) and quantizer
parameters, and are used by the tests and the CLI to overlay theory on
measurements. All bounds are upper bounds on expected Frobenius-norm error
(squared error for qsvd_bound).

Notation: for a bit budget d, the integer cap is D = 2^(d-1) - 1. For a
rank-r approximation of a k-wide matrix with singular values sigma_i, the
spectrum-shape term is f(r) = (sigma_{r+1} / sigma_1)^2 * (k - r).
"""

import math
from dataclasses import dataclass

from .errors import ParameterError
from .quant import bit_cap


@dataclass(frozen=True)
class BoundInputs:
    """Everything the product-level bounds need about C = A @ B.

    A is m x k with leading/tail singular values sigma1 >= sigma_r1; B is
    k x n with gamma1 >= gamma_r1. d1, d2, d3 are the stage bit budgets
    (for the plain quantized product only d1, d2 and the measured scales
    lambda1, lambda2 matter). For single-matrix bounds (qsvd_bound) the
    matrix is m x n and gamma fields are unused.
    """

    m: int
    n: int
    k: int = 0
    r: int = 0
    sigma1: float = 0.0
    sigma_r1: float = 0.0
    gamma1: float = 0.0
    gamma_r1: float = 0.0
    d1: int = 8
    d2: int = 8
    d3: int = 8
    q: int = 0
    lambda1: float = 0.0
    lambda2: float = 0.0

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ParameterError("dimensions must be positive")
        if self.sigma1 < self.sigma_r1 or self.sigma_r1 < 0:
            raise ParameterError("need sigma1 >= sigma_r1 >= 0")
        if self.gamma1 < self.gamma_r1 or self.gamma_r1 < 0:
            raise ParameterError("need gamma1 >= gamma_r1 >= 0")


def quant_scalar_var_bound(max_abs, bits):
    """Variance cap of the scalar quantizer on [-M, M]: M^2 / D^2."""
    if max_abs < 0:
        raise ParameterError("max_abs must be >= 0")
    return max_abs ** 2 / bit_cap(bits) ** 2


def quant_matrix_bound(m, n, scale):
    """Frobenius cap on whole-matrix quantization error: sqrt(m n) / scale."""
    if scale <= 0:
        raise ParameterError("scale must be positive")
    return math.sqrt(m * n) / scale


def qgemm_bound(bi):
    """Expected-error cap for the quantized product of A (m x k) and B (k x n).

    k * (sigma1 sqrt(n) / lambda2 + gamma1 sqrt(m) / lambda1
         + sqrt(m n) / (lambda1 lambda2))
    """
    if bi.lambda1 <= 0 or bi.lambda2 <= 0:
        raise ParameterError("quantizer scales must be positive")
    return bi.k * (
        bi.sigma1 * math.sqrt(bi.n) / bi.lambda2
        + bi.gamma1 * math.sqrt(bi.m) / bi.lambda1
        + math.sqrt(bi.m * bi.n) / (bi.lambda1 * bi.lambda2)
    )


def svd_trunc_bound(sigma_r1, p, r):
    """Cap on rank-r truncation error: sigma_{r+1} * sqrt(p - r)."""
    if r >= p:
        raise ParameterError(f"need r < p, got r={r}, p={p}")
    return sigma_r1 * math.sqrt(p - r)


def rsvd_error_bound(sigma_r1, p, r, q):
    """Expected spectral-error cap for the randomized rank-r factorization.

    [1 + 4 sqrt(2p / (r - 1))]^(1 / (2q + 1)) * sigma_{r+1}
    """
    if r < 2:
        raise ParameterError(f"bound needs r >= 2, got {r}")
    return (1.0 + 4.0 * math.sqrt(2.0 * p / (r - 1))) ** (1.0 / (2 * q + 1)) * sigma_r1


def qsvd_bound(bi):
    """Squared-error cap for a rank-r factorization of an m x n matrix whose
    scaled left factor is quantized at d1 and right factor at d2.

    sigma_{r+1}^2 (n - r) + m r sigma1^2 / D1^2 + n r sigma1^2 / D2^2
    + m n r sigma1^2 / (D1^2 D2^2)
    """
    d1c = bit_cap(bi.d1) ** 2
    d2c = bit_cap(bi.d2) ** 2
    s1sq = bi.sigma1 ** 2
    return (
        bi.sigma_r1 ** 2 * (bi.n - bi.r)
        + bi.m * bi.r * s1sq / d1c
        + bi.n * bi.r * s1sq / d2c
        + bi.m * bi.n * bi.r * s1sq / (d1c * d2c)
    )


def _l1(bi):
    # squared-error cap for A's quantized rank-r factorization (m x k)
    d1c = bit_cap(bi.d1) ** 2
    d2c = bit_cap(bi.d2) ** 2
    s1sq = bi.sigma1 ** 2
    return (
        bi.sigma_r1 ** 2 * (bi.k - bi.r)
        + bi.m * bi.r * s1sq / d1c
        + bi.k * bi.r * s1sq / d2c
        + bi.m * bi.k * bi.r * s1sq / (d1c * d2c)
    )


def _l2(bi):
    # squared-error cap for B's quantized rank-r factorization (k x n)
    d2c = bit_cap(bi.d2) ** 2
    d3c = bit_cap(bi.d3) ** 2
    g1sq = bi.gamma1 ** 2
    return (
        bi.gamma_r1 ** 2 * (bi.k - bi.r)
        + bi.k * bi.r * g1sq / d3c
        + bi.n * bi.r * g1sq / d2c
        + bi.k * bi.n * bi.r * g1sq / (d2c * d3c)
    )


def lramm_general_bound(bi):
    """Combined cap for the full low-rank quantized product.

    sqrt(L1 L4) + sqrt(L2 L3) + sqrt(L1 L2) with L1/L2 the per-operand
    squared-error caps above, L3 = sigma1^2 k and L4 = gamma1^2 k (caps on
    ||A||_F^2 and ||B||_F^2). The three terms bound ||R_A|| ||B||,
    ||R_B|| ||A|| and ||R_A|| ||R_B|| respectively.
    """
    l1 = _l1(bi)
    l2 = _l2(bi)
    l3 = bi.sigma1 ** 2 * bi.k
    l4 = bi.gamma1 ** 2 * bi.k
    return math.sqrt(l1 * l4) + math.sqrt(l2 * l3) + math.sqrt(l1 * l2)


def lramm_specific_bound(k, r, sigma1, f_r, d1_cap, d2_cap, d3_cap):
    """Symmetric-case (m = n = k, identically distributed operands) cap.

    k sigma1^2 sqrt(r) (P + Q) + k r sigma1^2 P Q, where
    P = sqrt(f(r) + 1/D1 + 1/D2 + k/(D1 D2)) and
    Q = sqrt(f(r) + 1/D2 + 1/D3 + k/(D2 D3)).

    Takes the integer caps D_i directly. Both radicands carry +f(r); a
    -f(r) variant would put a negative value under the root.
    """
    if f_r < 0:
        raise ParameterError("f_r must be >= 0")
    p = math.sqrt(f_r + 1.0 / d1_cap + 1.0 / d2_cap + k / (d1_cap * d2_cap))
    q = math.sqrt(f_r + 1.0 / d2_cap + 1.0 / d3_cap + k / (d2_cap * d3_cap))
    return k * sigma1 ** 2 * math.sqrt(r) * (p + q) + k * r * sigma1 ** 2 * p * q


def spectrum_shape_factor(sigma1, sigma_r1, k, r):
    """f(r) = (sigma_{r+1} / sigma_1)^2 * (k - r)."""
    if sigma1 <= 0:
        raise ParameterError("sigma1 must be positive")
    return (sigma_r1 / sigma1) ** 2 * (k - r)
