# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled log-mixture kernel; see ``kernels.py`` for the contract."""

import numpy as np

from cython.parallel cimport parallel, prange
from libc.math cimport exp, fmax, log
from libc.stdlib cimport free, malloc


cdef inline double _row_lse(double xr, double xi, double wr, double wi,
                            const double* cr, const double* ci, Py_ssize_t k,
                            double inv_s2, double* buf) noexcept nogil:
    cdef Py_ssize_t j
    cdef double dr, di, e, s
    cdef double m
    # seed the max with a real term; the build uses -ffast-math, so no infinities
    dr = xr - cr[0]
    di = xi - ci[0]
    m = -(dr * dr + di * di + 2.0 * (dr * wr + di * wi)) * inv_s2
    for j in range(k):
        dr = xr - cr[j]
        di = xi - ci[j]
        e = -(dr * dr + di * di + 2.0 * (dr * wr + di * wi)) * inv_s2
        buf[j] = e
        if e > m:
            m = e
    s = 0.0
    # branch-free so the exp loop vectorizes (libmvec); the clamp keeps
    # arguments out of the slow underflow path and adds at most k*exp(-80)
    for j in range(k):
        s += exp(fmax(buf[j] - m, -80.0))
    return m + log(s)


def log_mixture_excess(const double[::1] rows_re, const double[::1] rows_im,
                       const double[::1] c_re, const double[::1] c_im,
                       const double[:, ::1] noise_re, const double[:, ::1] noise_im,
                       double sigma_sq, int threads=1):
    cdef Py_ssize_t n_rows = rows_re.shape[0]
    cdef Py_ssize_t n_draws = noise_re.shape[1]
    cdef Py_ssize_t k = c_re.shape[0]
    cdef double inv_s2 = 1.0 / sigma_sq
    cdef Py_ssize_t r, s
    cdef double* buf
    out = np.empty((n_rows, n_draws), dtype=np.float64)
    cdef double[:, ::1] o = out
    if n_rows == 0 or n_draws == 0:
        return out
    if threads < 1:
        threads = 1
    with nogil, parallel(num_threads=threads):
        buf = <double*> malloc(k * sizeof(double))
        for r in prange(n_rows, schedule="static"):
            for s in range(n_draws):
                o[r, s] = _row_lse(rows_re[r], rows_im[r], noise_re[r, s], noise_im[r, s],
                                   &c_re[0], &c_im[0], k, inv_s2, buf)
        free(buf)
    return out
