# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: reference GEMM, integer GEMM, quantization rounding
and one-sided Jacobi rotation sweeps.

Every kernel accumulates sequentially per output element, so results are
independent of thread count and bitwise reproducible.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, rint, sqrt

cnp.import_array()


def matmul(double[:, ::1] a, double[:, ::1] b):
    """Plain float64 product A @ B with sequential accumulation over k."""
    cdef Py_ssize_t m = a.shape[0], k = a.shape[1], n = b.shape[1]
    if b.shape[0] != k:
        raise ValueError("inner dimensions differ")
    out_arr = np.zeros((m, n), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, t
    cdef double aik
    with nogil:
        for i in range(m):
            for t in range(k):
                aik = a[i, t]
                for j in range(n):
                    out[i, j] += aik * b[t, j]
    return out_arr


def imatmul(cnp.int32_t[:, ::1] a, cnp.int32_t[:, ::1] b):
    """Exact integer product with 64-bit accumulation."""
    cdef Py_ssize_t m = a.shape[0], k = a.shape[1], n = b.shape[1]
    if b.shape[0] != k:
        raise ValueError("inner dimensions differ")
    out_arr = np.zeros((m, n), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, t
    cdef cnp.int64_t aik
    with nogil:
        for i in range(m):
            for t in range(k):
                aik = a[i, t]
                for j in range(n):
                    out[i, j] += aik * b[t, j]
    return out_arr


def scale_round_clip(double[:, ::1] a, double scale, int cap):
    """Round scale*a to nearest even integer, clamped to [-cap, cap]."""
    cdef Py_ssize_t m = a.shape[0], n = a.shape[1]
    out_arr = np.empty((m, n), dtype=np.int32)
    cdef cnp.int32_t[:, ::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef double q
    with nogil:
        for i in range(m):
            for j in range(n):
                q = rint(a[i, j] * scale)
                if q > cap:
                    q = cap
                elif q < -cap:
                    q = -cap
                out[i, j] = <cnp.int32_t> q
    return out_arr


def jacobi_sweeps(double[:, ::1] w, double[:, ::1] v, double tol, int max_sweeps):
    """Run cyclic one-sided Jacobi rotations on the columns of w in place.

    v accumulates the right rotations (caller passes the identity). Returns
    the number of sweeps, or -1 if max_sweeps was hit before all column
    pairs satisfied |w_p . w_q| <= tol * |w_p| |w_q|.
    """
    cdef Py_ssize_t m = w.shape[0], n = w.shape[1]
    colsq_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] colsq = colsq_arr
    cdef Py_ssize_t i, p, q, sweep
    cdef double app, aqq, apq, tau, t, c, s, wp, wq, worst
    cdef bint rotated
    cdef int done = -1

    with nogil:
        for sweep in range(max_sweeps):
            # refresh cached squared column norms once per sweep
            for p in range(n):
                app = 0.0
                for i in range(m):
                    app += w[i, p] * w[i, p]
                colsq[p] = app
            worst = 0.0
            rotated = False
            for p in range(n - 1):
                for q in range(p + 1, n):
                    app = colsq[p]
                    aqq = colsq[q]
                    if app == 0.0 or aqq == 0.0:
                        continue
                    apq = 0.0
                    for i in range(m):
                        apq += w[i, p] * w[i, q]
                    if fabs(apq) <= tol * sqrt(app * aqq):
                        if worst * sqrt(app * aqq) < fabs(apq):
                            worst = fabs(apq) / sqrt(app * aqq)
                        continue
                    rotated = True
                    tau = (aqq - app) / (2.0 * apq)
                    if tau >= 0.0:
                        t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                    else:
                        t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                    c = 1.0 / sqrt(1.0 + t * t)
                    s = c * t
                    for i in range(m):
                        wp = w[i, p]
                        wq = w[i, q]
                        w[i, p] = c * wp - s * wq
                        w[i, q] = s * wp + c * wq
                    for i in range(n):
                        wp = v[i, p]
                        wq = v[i, q]
                        v[i, p] = c * wp - s * wq
                        v[i, q] = s * wp + c * wq
                    colsq[p] = c * c * app - 2.0 * c * s * apq + s * s * aqq
                    colsq[q] = s * s * app + 2.0 * c * s * apq + c * c * aqq
            if not rotated and worst <= tol:
                done = sweep + 1
                break
    return done
