import math

import numpy as np
import pytest

from lramm import (
    NORMAL01,
    UNIFORM01,
    Distribution,
    ParameterError,
    RsvdParams,
    frobenius_norm,
    generate,
    load_svd_factors,
    oracle_svd,
    qsvd_bound,
    quantized_svd_approx,
    range_finder,
    relative_error,
    rsvd,
    rsvd_error_bound,
    save_svd_factors,
    spectral_norm,
    truncate_svd,
)
from lramm.bounds import BoundInputs
from lramm.quant import dequantize


# ---------------------------------------------------------------------------
# range finder


def test_range_finder_orthonormal_identity_input():
    q = range_finder(np.eye(4), RsvdParams(rank=2, oversample=0, seed=1))
    assert q.shape == (4, 2)
    assert frobenius_norm(q.T @ q - np.eye(2)) <= 1e-8


def test_range_finder_captures_exact_low_rank():
    a = generate(60, 50, Distribution.lowrank(3, 0.0), 2)
    q = range_finder(a, RsvdParams(rank=3, oversample=2, seed=3))
    resid = frobenius_norm(a - q @ (q.T @ a))
    assert resid <= 1e-8 * frobenius_norm(a)


def test_range_finder_deterministic():
    a = generate(20, 15, NORMAL01, 4)
    p = RsvdParams(rank=5, power_iters=1, oversample=3, seed=9)
    assert np.array_equal(range_finder(a, p), range_finder(a, p))


def test_range_finder_rank_too_large():
    with pytest.raises(ParameterError):
        range_finder(np.ones((4, 4)), RsvdParams(rank=5))


def test_range_finder_oversample_clipped():
    # rank + oversample beyond min dim is clipped, not an error
    q = range_finder(np.eye(6), RsvdParams(rank=4, oversample=50, seed=1))
    assert q.shape == (6, 6)


# ---------------------------------------------------------------------------
# rsvd


def test_rsvd_exact_rank_one():
    u = np.zeros((30, 1))
    u[4, 0] = 1.0
    v = np.zeros((20, 1))
    v[11, 0] = 1.0
    a = 3.0 * u @ v.T
    f = rsvd(a, RsvdParams(rank=1, seed=5))
    assert abs(float(f.sigma[0]) - 3.0) <= 1e-8
    assert frobenius_norm(a - f.reconstruct()) <= 1e-8


def test_rsvd_factor_orthonormality():
    a = generate(40, 30, UNIFORM01, 6)
    f = rsvd(a, RsvdParams(rank=8, seed=7))
    assert frobenius_norm(f.u.T @ f.u - np.eye(8)) <= 1e-8 * math.sqrt(8)
    assert frobenius_norm(f.v.T @ f.v - np.eye(8)) <= 1e-8 * math.sqrt(8)
    assert np.all(np.diff(f.sigma) <= 1e-12)


def test_rsvd_diag_spectrum_recovery():
    # top-2 singular values of diag(5,4,3,2,1) with a 4-wide sketch: the
    # missed-direction leakage scales like (sigma_5 / sigma_2)^(2(2q+1)),
    # so q=1 only reaches ~1e-3 typical accuracy; q=4 reaches 1e-6.
    a = np.diag([5.0, 4.0, 3.0, 2.0, 1.0])
    errs_q1 = []
    for seed in range(10):
        f = rsvd(a, RsvdParams(rank=2, power_iters=1, oversample=2, seed=seed))
        errs_q1.append(float(np.max(np.abs(f.sigma - [5.0, 4.0]))))
    assert np.median(errs_q1) <= 5e-2
    for seed in range(5):
        f = rsvd(a, RsvdParams(rank=2, power_iters=4, oversample=2, seed=seed))
        assert np.max(np.abs(f.sigma - [5.0, 4.0])) <= 1e-6
    # a full-width sketch (default oversampling clipped to 5) is exact
    f = rsvd(a, RsvdParams(rank=2, power_iters=1, seed=0))
    assert np.max(np.abs(f.sigma - [5.0, 4.0])) <= 1e-10


def test_rsvd_deterministic():
    a = generate(25, 25, NORMAL01, 8)
    p = RsvdParams(rank=5, seed=11)
    f1, f2 = rsvd(a, p), rsvd(a, p)
    assert np.array_equal(f1.u, f2.u)
    assert np.array_equal(f1.sigma, f2.sigma)
    assert np.array_equal(f1.v, f2.v)


def test_rsvd_mean_spectral_error_within_bound():
    p = 100
    a_by_seed = [generate(p, p, UNIFORM01, 500 + s) for s in range(20)]
    errs = []
    for s, a in enumerate(a_by_seed):
        f = rsvd(a, RsvdParams(rank=10, seed=s))
        errs.append(spectral_norm(a - f.reconstruct()))
    sigma11 = float(oracle_svd(a_by_seed[0]).sigma[10])
    # use the largest tail value over the sample so the bound covers all draws
    sigma11 = max(float(oracle_svd(a).sigma[10]) for a in a_by_seed)
    assert np.mean(errs) <= rsvd_error_bound(sigma11, p, 10, 0)


def test_rsvd_power_iterations_improve_accuracy():
    resid_q0, resid_q2 = [], []
    for seed in range(20):
        a = generate(60, 60, NORMAL01, 600 + seed)
        for q_iters, sink in ((0, resid_q0), (2, resid_q2)):
            f = rsvd(a, RsvdParams(rank=6, power_iters=q_iters, seed=seed))
            sink.append(frobenius_norm(a - f.reconstruct()))
    assert np.median(resid_q2) <= np.median(resid_q0)


# ---------------------------------------------------------------------------
# truncation


def test_truncate_residual_single_tail_value():
    a = np.diag([3.0, 2.0, 1.0])
    f = truncate_svd(oracle_svd(a), 2)
    assert abs(frobenius_norm(a - f.reconstruct()) - 1.0) <= 1e-12


def test_truncate_full_rank_residual_zero():
    a = generate(10, 10, NORMAL01, 9)
    f = truncate_svd(oracle_svd(a), 10)
    assert frobenius_norm(a - f.reconstruct()) <= 1e-10 * frobenius_norm(a)


def test_truncate_error_equality():
    a = generate(50, 40, NORMAL01, 10)
    f = oracle_svd(a)
    fr = truncate_svd(f, 10)
    err = frobenius_norm(a - fr.reconstruct())
    tail = math.sqrt(float(np.sum(f.sigma[10:] ** 2)))
    assert abs(err - tail) <= 1e-8 * frobenius_norm(a)


def test_truncate_error_within_tail_bound():
    from lramm import svd_trunc_bound

    for seed in range(6):
        a = generate(30, 24, UNIFORM01, 40 + seed)
        f = oracle_svd(a)
        for rank in (2, 5, 12):
            err = frobenius_norm(a - truncate_svd(f, rank).reconstruct())
            assert err <= svd_trunc_bound(float(f.sigma[rank]), 24, rank) + 1e-12


def test_truncate_rank_error():
    f = oracle_svd(np.eye(4))
    with pytest.raises(ParameterError):
        truncate_svd(f, 5)


# ---------------------------------------------------------------------------
# quantized low-rank approximation of a single matrix


def test_quantized_svd_near_lossless():
    a = np.diag([2.0, 1.0])
    _, _, rec = quantized_svd_approx(a, 2, 24, 24)
    assert frobenius_norm(rec - a) <= 1e-4 * frobenius_norm(a)


def test_quantized_svd_factor_ranges():
    a = generate(40, 40, UNIFORM01, 12)
    f = oracle_svd(a)
    fr = truncate_svd(f, 6)
    # orthonormal right factor stays within [-1, 1]; scaled left factor
    # within sigma_1
    assert np.max(np.abs(fr.v)) <= 1.0 + 1e-12
    assert np.max(np.abs(fr.u * fr.sigma)) <= float(f.sigma[0]) + 1e-12
    qu, qv, _ = quantized_svd_approx(a, 6, 8, 8)
    assert np.max(np.abs(qu.data)) <= 127
    assert np.max(np.abs(qv.data)) <= 127


def test_quantized_svd_rank_one_relative_error():
    errs = []
    for seed in range(20):
        a = generate(32, 32, Distribution.lowrank(1, 0.0), 700 + seed)
        _, _, rec = quantized_svd_approx(a, 1, 8, 8)
        errs.append(relative_error(rec, a))
    assert np.mean(errs) <= 0.02


def test_quantized_svd_squared_error_within_bound():
    sq_errs = []
    bound = None
    for seed in range(20):
        a = generate(64, 64, Distribution.lowrank(8, 0.0), 800 + seed)
        f = oracle_svd(a)
        _, _, rec = quantized_svd_approx(a, 8, 8, 8)
        sq_errs.append(frobenius_norm(a - rec) ** 2)
        bound = qsvd_bound(
            BoundInputs(
                m=64, n=64, r=8,
                sigma1=float(f.sigma[0]), sigma_r1=float(f.sigma[8]),
                d1=8, d2=8,
            )
        )
    assert np.mean(sq_errs) <= bound


def test_quantized_svd_dequantized_factors_reconstruct():
    a = generate(20, 14, NORMAL01, 13)
    qu, qv, rec = quantized_svd_approx(a, 5, 16, 16)
    again = dequantize(qu) @ dequantize(qv).T
    assert np.allclose(rec, again, rtol=0, atol=1e-12)


def test_quantized_svd_rank_error():
    with pytest.raises(ParameterError):
        quantized_svd_approx(np.ones((4, 4)), 5, 8, 8)


# ---------------------------------------------------------------------------
# factor files


def test_factor_roundtrip(tmp_path):
    a = generate(18, 12, NORMAL01, 14)
    f = rsvd(a, RsvdParams(rank=4, seed=15))
    save_svd_factors(f, tmp_path / "facs")
    back = load_svd_factors(tmp_path / "facs")
    assert np.array_equal(back.u, f.u)
    assert np.array_equal(back.sigma, f.sigma)
    assert np.array_equal(back.v, f.v)
