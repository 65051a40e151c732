"""Dense matrix foundation: norms, reference GEMM, seeded generation under
several entry distributions, a dense SVD oracle and bit-exact file I/O.

Matrices are plain C-contiguous float64 numpy arrays of shape (rows, cols).
"""

import struct
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    DegenerateDenominatorError,
    FormatError,
    OracleLimitError,
    ParameterError,
    ShapeError,
)

# Size cap for the dense SVD oracle: it is a slow, simply verifiable
# reference, not a production factorization.
ORACLE_MAX_MIN_DIM = 512

_MAGIC = b"LRMM"
_VERSION = 1
DTYPE_F64 = 1
DTYPE_I32 = 2


def as_matrix(a, name="matrix"):
    """Validate and coerce input to a C-contiguous float64 2-D array."""
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got ndim={arr.ndim}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeError(f"{name} must have positive dimensions, got {arr.shape}")
    return np.ascontiguousarray(arr)


# ---------------------------------------------------------------------------
# distributions

_KINDS = ("uniform", "normal", "exponential", "binary", "lowrank")


@dataclass(frozen=True)
class Distribution:
    """Entry distribution for generate().

    kind is one of 'uniform' (U[0,1)), 'normal' (N(0,1)), 'exponential'
    (rate 1), 'binary' ({0,1} fair), or 'lowrank'. The lowrank kind builds
    sum_i (1/i) u_i v_i^T from random orthonormal factors, i = 1..rank,
    plus optional entrywise Gaussian noise of scale noise_sigma.
    """

    kind: str
    rank: int = 0
    noise_sigma: float = 0.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ParameterError(f"unknown distribution kind {self.kind!r}")
        if self.kind == "lowrank":
            if self.rank < 1:
                raise ParameterError("lowrank distribution needs rank >= 1")
            if self.noise_sigma < 0:
                raise ParameterError("noise_sigma must be >= 0")

    @classmethod
    def lowrank(cls, rank, noise_sigma=0.0):
        return cls("lowrank", rank=rank, noise_sigma=float(noise_sigma))

    def label(self):
        """Stable string form used in CSV output; contains no comma."""
        if self.kind == "lowrank":
            return f"lowrank({self.rank};{self.noise_sigma!r})"
        return self.kind


UNIFORM01 = Distribution("uniform")
NORMAL01 = Distribution("normal")
EXPONENTIAL1 = Distribution("exponential")
BINARY01 = Distribution("binary")

_DIST_TAG = {"uniform": 1, "normal": 2, "exponential": 3, "binary": 4, "lowrank": 5}


def _rng(seed, *context):
    """Deterministic counter-based generator keyed by seed and context ints."""
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF] + [int(c) & 0xFFFFFFFFFFFFFFFF for c in context]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def generate(rows, cols, dist, seed):
    """Generate a seeded (rows x cols) matrix under the given Distribution.

    Deterministic for fixed (rows, cols, dist, seed) regardless of thread
    count; the generator is counter-based (Philox) and draws the whole
    matrix in one pass.
    """
    if rows < 1 or cols < 1:
        raise ShapeError(f"dimensions must be positive, got {rows}x{cols}")
    if not isinstance(dist, Distribution):
        raise ParameterError("dist must be a Distribution")
    g = _rng(seed, _DIST_TAG[dist.kind], rows, cols, dist.rank)
    if dist.kind == "uniform":
        a = g.random((rows, cols))
    elif dist.kind == "normal":
        a = g.standard_normal((rows, cols))
    elif dist.kind == "exponential":
        a = g.standard_exponential((rows, cols))
    elif dist.kind == "binary":
        a = g.integers(0, 2, size=(rows, cols)).astype(np.float64)
    else:
        if dist.rank > min(rows, cols):
            raise ParameterError(
                f"lowrank rank {dist.rank} exceeds min(rows, cols) = {min(rows, cols)}"
            )
        u = np.linalg.qr(g.standard_normal((rows, dist.rank)))[0]
        v = np.linalg.qr(g.standard_normal((cols, dist.rank)))[0]
        sing = 1.0 / np.arange(1, dist.rank + 1)
        a = (u * sing) @ v.T
        if dist.noise_sigma > 0:
            a = a + dist.noise_sigma * g.standard_normal((rows, cols))
    return np.ascontiguousarray(a)


# ---------------------------------------------------------------------------
# core operations


def gemm(a, b, alpha=1.0, beta=0.0, c=None):
    """Reference GEMM: alpha * A @ B + beta * C in float64.

    Accumulation per output element is sequential over the inner dimension,
    so the result is deterministic and thread-count independent.
    """
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"inner dimensions differ: {a.shape} @ {b.shape}")
    if c is not None:
        c = as_matrix(c, "c")
        if c.shape != (a.shape[0], b.shape[1]):
            raise ShapeError(f"c has shape {c.shape}, expected {(a.shape[0], b.shape[1])}")
    prod = _kernels.matmul(a, b)
    if beta != 0.0 and c is not None:
        return alpha * prod + beta * c
    if alpha != 1.0:
        return alpha * prod
    return prod


def frobenius_norm(a):
    """sqrt of the sum of squared entries."""
    a = as_matrix(a)
    return float(np.sqrt(np.sum(a * a)))


def spectral_norm(a):
    """Largest singular value.

    Uses the SVD oracle for small matrices and power iteration on A^T A
    (1e-10 relative tolerance) otherwise.
    """
    a = as_matrix(a)
    m, n = a.shape
    if not a.any():
        return 0.0
    if min(m, n) <= 64:
        return float(oracle_svd(a).sigma[0])
    v = _rng(0x5EEDFACE, m, n).standard_normal(n)
    v /= np.sqrt(v @ v)
    sigma = 0.0
    for _ in range(20000):
        w = a @ v
        z = a.T @ w
        zn = np.sqrt(z @ z)
        if zn == 0.0:
            return 0.0
        v = z / zn
        new_sigma = np.sqrt(zn)  # |A^T A v| converges to sigma_1^2
        if abs(new_sigma - sigma) <= 1e-10 * new_sigma:
            return float(new_sigma)
        sigma = new_sigma
    return float(sigma)


def relative_error(approx, exact):
    """||approx - exact||_F / ||exact||_F."""
    approx = as_matrix(approx, "approx")
    exact = as_matrix(exact, "exact")
    if approx.shape != exact.shape:
        raise ShapeError(f"shape mismatch: {approx.shape} vs {exact.shape}")
    denom = frobenius_norm(exact)
    if denom == 0.0:
        raise DegenerateDenominatorError("exact matrix has zero Frobenius norm")
    return frobenius_norm(approx - exact) / denom


# ---------------------------------------------------------------------------
# SVD oracle


@dataclass(frozen=True)
class SvdFactors:
    """Thin SVD triple: u (m x t), sigma (t, descending), v (n x t)."""

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        t = self.sigma.shape[0]
        if self.u.shape[1] != t or self.v.shape[1] != t:
            raise ShapeError("factor widths disagree with sigma length")
        if t > 1 and np.any(np.diff(self.sigma) > 0):
            raise ParameterError("sigma must be sorted descending")
        if np.any(self.sigma < 0):
            raise ParameterError("sigma must be non-negative")

    @property
    def shape(self):
        return (self.u.shape[0], self.v.shape[0])

    def reconstruct(self):
        """Sum of sigma_i u_i v_i^T, shape m x n."""
        return gemm(self.u * self.sigma, np.ascontiguousarray(self.v.T))


def oracle_svd(a):
    """Ground-truth dense SVD, capped at min(m, n) <= 512.

    The compiled backend runs one-sided Jacobi rotations; the fallback
    delegates to LAPACK. Either way the reconstruction residual is at most
    1e-10 * ||A||_F and sigma is descending.
    """
    a = as_matrix(a)
    if min(a.shape) > ORACLE_MAX_MIN_DIM:
        raise OracleLimitError(
            f"oracle SVD capped at min dim {ORACLE_MAX_MIN_DIM}, got {a.shape}"
        )
    u, s, v = _kernels.svd(a)
    return SvdFactors(u=u, sigma=s, v=v)


# ---------------------------------------------------------------------------
# file I/O

_HEADER = struct.Struct("<4sIIQQ")  # magic, version, dtype, rows, cols


def _write_container(path, dtype_code, payload, rows, cols, trailer=b""):
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, _VERSION, dtype_code, rows, cols))
        fh.write(payload)
        fh.write(trailer)


def _read_container(path, expect_dtype):
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise FormatError("file shorter than header", len(raw))
    magic, version, dtype_code, rows, cols = _HEADER.unpack_from(raw, 0)
    if magic != _MAGIC:
        raise FormatError(f"bad magic {magic!r}", 0)
    if version != _VERSION:
        raise FormatError(f"unsupported version {version}", 4)
    if dtype_code != expect_dtype:
        raise FormatError(f"dtype code {dtype_code}, expected {expect_dtype}", 8)
    if rows < 1 or cols < 1:
        raise FormatError(f"non-positive dims {rows}x{cols}", 12)
    itemsize = 8 if dtype_code == DTYPE_F64 else 4
    need = rows * cols * itemsize
    body = raw[_HEADER.size:]
    if len(body) < need:
        raise FormatError(
            f"payload truncated: need {need} bytes, have {len(body)}",
            _HEADER.size + len(body),
        )
    return body[:need], body[need:], rows, cols


def save_matrix(a, path):
    """Write a matrix in the LRMM binary container (bit-exact round trip)."""
    a = as_matrix(a)
    payload = a.astype("<f8", copy=False).tobytes()
    _write_container(path, DTYPE_F64, payload, a.shape[0], a.shape[1])


def load_matrix(path):
    """Read a float64 matrix written by save_matrix."""
    payload, _, rows, cols = _read_container(path, DTYPE_F64)
    data = np.frombuffer(payload, dtype="<f8").astype(np.float64)
    a = data.reshape(rows, cols)
    if not np.isfinite(a).all():
        raise FormatError("payload contains non-finite values", _HEADER.size)
    return np.ascontiguousarray(a)


def save_matrix_csv(a, path):
    """Plain comma-separated rows, period decimals, no header."""
    a = as_matrix(a)
    with open(path, "w") as fh:
        for row in a:
            fh.write(",".join(repr(x) for x in row.tolist()))
            fh.write("\n")


def load_matrix_csv(path):
    """Read a matrix written by save_matrix_csv (or any headerless CSV)."""
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                rows.append([float(tok) for tok in line.split(",")])
            except ValueError as exc:
                raise FormatError(f"bad CSV value on line {lineno}: {exc}", 0) from None
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise FormatError("empty or ragged CSV matrix", 0)
    return as_matrix(np.array(rows))
