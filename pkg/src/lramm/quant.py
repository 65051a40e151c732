"""Symmetric linear quantizer and integer quantized GEMM.

A matrix is mapped to signed integers via q = round(scale * a) with
scale = (2^(bits-1) - 1) / max|a|, so the extreme entries land exactly on
+-(2^(bits-1) - 1). Bit budgets from 2 to 24 are simulated in 32-bit
containers; products accumulate in 64 bits.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels, matcore
from .errors import FormatError, OverflowRiskError, ParameterError, ShapeError

BITS_MIN = 2
BITS_MAX = 24


def bit_cap(bits):
    """Largest representable magnitude for a bit budget: 2^(bits-1) - 1."""
    return (1 << (bits - 1)) - 1


def _check_bits(bits, name="bits"):
    if not isinstance(bits, (int, np.integer)) or not BITS_MIN <= int(bits) <= BITS_MAX:
        raise ParameterError(f"{name} must be an integer in [{BITS_MIN}, {BITS_MAX}], got {bits}")
    return int(bits)


@dataclass(frozen=True)
class QuantizedMatrix:
    """Integer matrix plus its quantizer scale and bit budget."""

    data: np.ndarray  # int32, shape (rows, cols)
    bits: int
    scale: float

    def __post_init__(self):
        if self.data.ndim != 2 or self.data.dtype != np.int32:
            raise ShapeError("quantized payload must be a 2-D int32 array")
        _check_bits(self.bits)
        if not self.scale > 0:
            raise ParameterError(f"scale must be positive, got {self.scale}")

    @property
    def rows(self):
        return self.data.shape[0]

    @property
    def cols(self):
        return self.data.shape[1]


def quantize(a, bits):
    """Quantize to `bits`-wide signed integers with a per-matrix scale.

    All-zero input gets the sentinel scale 1.0 (the scale formula divides
    by max|a|, undefined at zero).
    """
    a = matcore.as_matrix(a)
    bits = _check_bits(bits)
    if not np.isfinite(a).all():
        raise ParameterError("cannot quantize non-finite entries")
    cap = bit_cap(bits)
    amax = float(np.max(np.abs(a)))
    if amax == 0.0:
        return QuantizedMatrix(np.zeros(a.shape, dtype=np.int32), bits, 1.0)
    scale = cap / amax
    data = _kernels.scale_round_clip(a, scale, cap)
    return QuantizedMatrix(data, bits, scale)


def dequantize(q):
    """Map integers back to float64: entries / scale."""
    return q.data.astype(np.float64) / q.scale


def integer_matmul(qa, qb):
    """Exact integer product of two quantized matrices (int64 entries)."""
    if qa.cols != qb.rows:
        raise ShapeError(f"inner dimensions differ: {qa.data.shape} @ {qb.data.shape}")
    _check_overflow(qa.cols, qa.bits, qb.bits)
    return _kernels.imatmul(qa.data, qb.data)


def _check_overflow(k, bits_a, bits_b):
    # worst-case |sum| = k * cap_a * cap_b must stay below 2^63
    worst = k * bit_cap(bits_a) * bit_cap(bits_b)
    if worst >= 1 << 63:
        raise OverflowRiskError(
            f"k={k} with bit budgets ({bits_a}, {bits_b}) risks int64 overflow"
        )


def qgemm(a, b, bits_a, bits_b, alpha=1.0, beta=0.0, c=None):
    """Quantized GEMM: alpha * dequant(int(A) @ int(B)) + beta * C.

    Both operands are quantized fresh at their bit budgets, multiplied
    exactly in integers, and the product is dequantized by the product of
    the two scales. Bitwise deterministic.
    """
    a = matcore.as_matrix(a, "a")
    b = matcore.as_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"inner dimensions differ: {a.shape} @ {b.shape}")
    if c is not None:
        c = matcore.as_matrix(c, "c")
        if c.shape != (a.shape[0], b.shape[1]):
            raise ShapeError(f"c has shape {c.shape}, expected {(a.shape[0], b.shape[1])}")
    bits_a = _check_bits(bits_a, "bits_a")
    bits_b = _check_bits(bits_b, "bits_b")
    _check_overflow(a.shape[1], bits_a, bits_b)
    qa = quantize(a, bits_a)
    qb = quantize(b, bits_b)
    prod = _kernels.imatmul(qa.data, qb.data).astype(np.float64) / (qa.scale * qb.scale)
    if beta != 0.0 and c is not None:
        return alpha * prod + beta * c
    if alpha != 1.0:
        return alpha * prod
    return prod


# ---------------------------------------------------------------------------
# serialization: LRMM container with dtype code 2 plus (bits, scale) trailer

_TRAILER = np.dtype([("bits", "<u4"), ("scale", "<f8")])


def save_quantized(q, path):
    """Write a QuantizedMatrix (int32 payload, bits/scale trailer)."""
    payload = q.data.astype("<i4", copy=False).tobytes()
    trailer = np.array([(q.bits, q.scale)], dtype=_TRAILER).tobytes()
    matcore._write_container(path, matcore.DTYPE_I32, payload, q.rows, q.cols, trailer)


def load_quantized(path):
    """Read a QuantizedMatrix written by save_quantized."""
    payload, rest, rows, cols = matcore._read_container(path, matcore.DTYPE_I32)
    if len(rest) < _TRAILER.itemsize:
        raise FormatError(
            "missing bits/scale trailer", matcore._HEADER.size + len(payload) + len(rest)
        )
    trailer = np.frombuffer(rest[: _TRAILER.itemsize], dtype=_TRAILER)[0]
    data = np.frombuffer(payload, dtype="<i4").astype(np.int32).reshape(rows, cols)
    return QuantizedMatrix(np.ascontiguousarray(data), int(trailer["bits"]), float(trailer["scale"]))
