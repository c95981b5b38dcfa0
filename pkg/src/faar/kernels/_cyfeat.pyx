# cython: boundscheck=False, wraparound=False, cdivision=True
"""Scalar-loop feature kernel: rms, max_grad, zcr, kurt per window row."""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, sqrt, INFINITY

DEF FLAT_M2_REL = 1e-30


def timedomain_features(cnp.ndarray[cnp.float64_t, ndim=2] wins not None):
    cdef Py_ssize_t rows = wins.shape[0]
    cdef Py_ssize_t n = wins.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((rows, 4), dtype=np.float64)
    cdef Py_ssize_t r, i
    cdef double x, prev, d
    cdef double ms, mean, m2, m4, mg, acc
    cdef int sign, prev_sign, first_sign, crossings

    for r in range(rows):
        acc = 0.0
        mean = 0.0
        for i in range(n):
            x = wins[r, i]
            acc += x * x
            mean += x
        ms = acc / n
        mean = mean / n

        m2 = 0.0
        m4 = 0.0
        for i in range(n):
            d = wins[r, i] - mean
            d = d * d
            m2 += d
            m4 += d * d
        m2 = m2 / n
        m4 = m4 / n

        mg = 0.0
        for i in range(1, n):
            d = fabs(wins[r, i] - wins[r, i - 1])
            if d > mg:
                mg = d

        # sign inheritance: zeros adopt the previous nonzero sign, leading
        # zeros the first nonzero sign; all-zero rows have zero crossings
        first_sign = 0
        for i in range(n):
            x = wins[r, i]
            if x != 0.0:
                first_sign = 1 if x > 0.0 else -1
                break
        crossings = 0
        prev_sign = first_sign
        for i in range(n):
            x = wins[r, i]
            if x > 0.0:
                sign = 1
            elif x < 0.0:
                sign = -1
            else:
                sign = prev_sign
            if i > 0 and sign != prev_sign:
                crossings += 1
            prev_sign = sign

        out[r, 0] = sqrt(ms)
        out[r, 1] = mg
        out[r, 2] = crossings / <double>(n - 1)
        if m2 <= FLAT_M2_REL * ms:
            out[r, 3] = INFINITY
        else:
            out[r, 3] = m4 / (m2 * m2)
    return out
