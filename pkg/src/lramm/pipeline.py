"""Three-stage low-rank quantized approximate GEMM.

Both operands are factorized with the randomized SVD, the singular values
are folded into the outer factors in float64, and the remaining three
products run as integer quantized GEMMs at independent bit budgets:

    E1 = QM(V_r^T  W_r, d1)     (r x r)
    E2 = QM(E1     Zsc, d2)     (r x n)
    E3 = QM(Usc    E2,  d3)     (m x n)
    D  = alpha * E3 + beta * C

with Usc = U_r diag(sigma) and Zsc = diag(gamma) Z_r^T. Every QM step
quantizes its real-valued operands afresh at its own budget.

The MAC cost model weights each stage by bit-width squared. Its
convention attaches d1^2 to the m*n*r product and d2^2/d3^2 to the two
small ones, while the executable pipeline applies d1 to the first (r x r)
product and d3 to the final large one; the two are kept as-is so modeled
numbers stay comparable across parameter sweeps.
"""

import math
import time
from dataclasses import dataclass

import numpy as np

from . import bounds as bounds_mod
from . import matcore, quant, rsvd
from .errors import ParameterError, ShapeError
from .matcore import as_matrix, gemm
from .rsvd import DEFAULT_OVERSAMPLE, RsvdParams

_SEED_TAG_A = 0xA0
_SEED_TAG_B = 0xB0

STAGES = ("rsvd", "scaling", "gemm1", "gemm2", "gemm3")

_PRESETS = {
    # low bits on the small middle product, per the tuning recommendation
    "paper-tuned": (8, 4, 8),
    # experimentally strongest: full precision early, 4-bit final product
    "balanced": (8, 8, 4),
    "max-speed": (4, 4, 4),
}

DEFAULT_D0 = 64


@dataclass(frozen=True)
class LrammParams:
    """Rank, per-stage bit budgets, sketch controls and output scalars."""

    rank: int
    bits: tuple = (8, 8, 4)
    power_iters: int = 0
    oversample: int = DEFAULT_OVERSAMPLE
    seed: int = 0
    alpha: float = 1.0
    beta: float = 0.0

    def __post_init__(self):
        if self.rank < 2:
            raise ParameterError(f"rank must be >= 2, got {self.rank}")
        if len(self.bits) != 3:
            raise ParameterError("bits must be a (d1, d2, d3) triple")
        for d in self.bits:
            quant._check_bits(d)
        if self.power_iters < 0 or self.oversample < 0:
            raise ParameterError("power_iters and oversample must be >= 0")


def preset(name):
    """Named parameter fragment: bits triple plus sketch defaults.

    Returns a dict suitable for LrammParams(rank=..., **preset(name)); the
    rank is left to the caller.
    """
    if name not in _PRESETS:
        raise ParameterError(f"unknown preset {name!r}; choose from {sorted(_PRESETS)}")
    return {"bits": _PRESETS[name], "power_iters": 0, "oversample": DEFAULT_OVERSAMPLE}


@dataclass(frozen=True)
class CostModel:
    """Bit-width-squared weighted MAC counts per pipeline stage."""

    d0: int
    rsvd: int
    scaling: int
    gemm1: int
    gemm2: int
    gemm3: int
    baseline_qgemm: int
    exact_gemm: int

    @property
    def total(self):
        return self.rsvd + self.scaling + self.gemm1 + self.gemm2 + self.gemm3

    def stage_counts(self):
        return {name: getattr(self, name) for name in STAGES}

    def speedup_vs_baseline(self):
        return self.baseline_qgemm / self.total


def cost_model(m, n, k, r, d0=DEFAULT_D0, d1=8, d2=8, d3=8):
    """Weighted MAC counts for the pipeline at the given shape and budgets.

    Stage formulas (log base 2):
      rsvd:    d0^2 ((m+n) k log2(r) + (m+n+2k) r^2)
      scaling: d0^2 (m r + n r)
      gemm1:   d0^2 2 k r + d2^2 k r^2
      gemm2:   d0^2 (r^2 + n r) + d3^2 n r^2
      gemm3:   d0^2 (n r + m r) + d1^2 m n r
    plus the full-quantization baseline d1^2 m n k and the original
    precision reference d0^2 m n k.
    """
    if min(m, n, k) < 1 or d0 < 1:
        raise ParameterError("dimensions and d0 must be positive")
    if r < 2:
        raise ParameterError(f"rank must be >= 2, got {r}")
    d0sq, d1sq, d2sq, d3sq = d0 * d0, d1 * d1, d2 * d2, d3 * d3
    return CostModel(
        d0=d0,
        rsvd=round(d0sq * ((m + n) * k * math.log2(r) + (m + n + 2 * k) * r * r)),
        scaling=d0sq * (m * r + n * r),
        gemm1=d0sq * 2 * k * r + d2sq * k * r * r,
        gemm2=d0sq * (r * r + n * r) + d3sq * n * r * r,
        gemm3=d0sq * (n * r + m * r) + d1sq * m * n * r,
        baseline_qgemm=d1sq * m * n * k,
        exact_gemm=d0sq * m * n * k,
    )


@dataclass(frozen=True)
class StageTimings:
    """Wall-clock nanoseconds per stage plus the weighted MAC model.

    Wall clock is hardware dependent and informational; the MAC model is
    the portable cost measure.
    """

    wall_ns: dict
    macs: CostModel

    def wall_total(self):
        return sum(self.wall_ns.values())


def _child_seeds(seed):
    state = np.random.SeedSequence(
        [int(seed) & 0xFFFFFFFFFFFFFFFF, _SEED_TAG_A, _SEED_TAG_B]
    ).generate_state(2, dtype=np.uint64)
    return int(state[0]), int(state[1])


def lramm(a, b, params, c=None):
    """Approximate alpha * A @ B + beta * C through the three-stage pipeline.

    Returns (D, StageTimings). Deterministic: identical inputs and params
    produce a bitwise identical D.
    """
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    m, k = a.shape
    k2, n = b.shape
    if k != k2:
        raise ShapeError(f"inner dimensions differ: {a.shape} @ {b.shape}")
    if c is not None:
        c = as_matrix(c, "c")
        if c.shape != (m, n):
            raise ShapeError(f"c has shape {c.shape}, expected {(m, n)}")
    if params.rank > min(m, k) or params.rank > min(k, n):
        raise ParameterError(
            f"rank {params.rank} exceeds operand min dims {min(m, k)}, {min(k, n)}"
        )
    d1, d2, d3 = params.bits
    seed_a, seed_b = _child_seeds(params.seed)
    wall = {}

    t0 = time.perf_counter_ns()
    fa = rsvd.rsvd(a, RsvdParams(params.rank, params.power_iters, params.oversample, seed_a))
    fb = rsvd.rsvd(b, RsvdParams(params.rank, params.power_iters, params.oversample, seed_b))
    wall["rsvd"] = time.perf_counter_ns() - t0

    t0 = time.perf_counter_ns()
    u_scaled = np.ascontiguousarray(fa.u * fa.sigma)          # m x r
    z_scaled = np.ascontiguousarray((fb.v * fb.sigma).T)      # r x n
    vt = np.ascontiguousarray(fa.v.T)                         # r x k
    w = fb.u                                                  # k x r
    wall["scaling"] = time.perf_counter_ns() - t0

    t0 = time.perf_counter_ns()
    e1 = quant.qgemm(vt, w, d1, d1)
    wall["gemm1"] = time.perf_counter_ns() - t0

    t0 = time.perf_counter_ns()
    e2 = quant.qgemm(e1, z_scaled, d2, d2)
    wall["gemm2"] = time.perf_counter_ns() - t0

    t0 = time.perf_counter_ns()
    e3 = quant.qgemm(u_scaled, e2, d3, d3)
    if params.beta != 0.0 and c is not None:
        d = params.alpha * e3 + params.beta * c
    elif params.alpha != 1.0:
        d = params.alpha * e3
    else:
        d = e3
    wall["gemm3"] = time.perf_counter_ns() - t0

    macs = cost_model(m, n, k, params.rank, DEFAULT_D0, d1, d2, d3)
    return d, StageTimings(wall_ns=wall, macs=macs)


# ---------------------------------------------------------------------------
# measurement report


@dataclass(frozen=True)
class ErrorReport:
    """Measured errors for one approximate multiply plus the matching bound."""

    m: int
    n: int
    k: int
    r: int
    d1: int
    d2: int
    d3: int
    q: int
    seed: int
    fro_error: float
    rel_error: float
    bound_combined: float
    macs: CostModel
    wall_ns: dict
    sigma_source: str = "oracle"

    def to_dict(self):
        macs = self.macs.stage_counts()
        macs["total"] = self.macs.total
        return {
            "m": self.m,
            "n": self.n,
            "k": self.k,
            "r": self.r,
            "d1": self.d1,
            "d2": self.d2,
            "d3": self.d3,
            "q": self.q,
            "seed": self.seed,
            "fro_error": self.fro_error,
            "rel_error": self.rel_error,
            "bound_combined": self.bound_combined,
            "macs": macs,
            "wall_ns": dict(self.wall_ns),
            "sigma_source": self.sigma_source,
        }


def leading_sigmas(a, count, seed=0):
    """First `count` singular values, by oracle when the size cap allows,
    otherwise estimated with the randomized factorization.

    Returns (values, source) with source 'oracle' or 'rsvd'.
    """
    a = as_matrix(a)
    if min(a.shape) <= matcore.ORACLE_MAX_MIN_DIM:
        return matcore.oracle_svd(a).sigma[:count], "oracle"
    params = RsvdParams(rank=min(count, min(a.shape)), power_iters=1, seed=seed)
    return rsvd.rsvd(a, params).sigma[:count], "rsvd"


def combined_bound(a, b, params):
    """lramm_general_bound evaluated from measured singular values."""
    r = params.rank
    sa, src_a = leading_sigmas(a, r + 1, params.seed)
    sb, src_b = leading_sigmas(b, r + 1, params.seed + 1)
    d1, d2, d3 = params.bits
    bi = bounds_mod.BoundInputs(
        m=a.shape[0],
        n=b.shape[1],
        k=a.shape[1],
        r=r,
        sigma1=float(sa[0]),
        sigma_r1=float(sa[r]) if len(sa) > r else 0.0,
        gamma1=float(sb[0]),
        gamma_r1=float(sb[r]) if len(sb) > r else 0.0,
        d1=d1,
        d2=d2,
        d3=d3,
        q=params.power_iters,
    )
    source = "oracle" if (src_a == "oracle" and src_b == "oracle") else "rsvd"
    return bounds_mod.lramm_general_bound(bi), source


def evaluate(a, b, params, c=None):
    """Run the pipeline and compare against the exact GEMM.

    Returns (D, ErrorReport).
    """
    d, timings = lramm(a, b, params, c=c)
    exact = gemm(a, b, params.alpha, params.beta, c)
    fro = matcore.frobenius_norm(d - exact)
    rel = matcore.relative_error(d, exact)
    bound, source = combined_bound(a, b, params)
    d1, d2, d3 = params.bits
    report = ErrorReport(
        m=a.shape[0],
        n=b.shape[1],
        k=a.shape[1],
        r=params.rank,
        d1=d1,
        d2=d2,
        d3=d3,
        q=params.power_iters,
        seed=params.seed,
        fro_error=fro,
        rel_error=rel,
        bound_combined=bound,
        macs=timings.macs,
        wall_ns=timings.wall_ns,
        sigma_source=source,
    )
    return d, report
