# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
# cython: language_level=3
"""Compiled inner loops. Signatures mirror gowerslab._fallback exactly."""

import numpy as np
cimport numpy as cnp

ctypedef double complex cplx
ctypedef cnp.int64_t i64


def autocorr_energy(const cplx[::1] f):
    """sum_h |sum_x f(x+h) conj f(x)|^2 / N^3, i.e. the fourth power of the U^2 norm."""
    cdef Py_ssize_t n = f.shape[0], h, x, y
    cdef cplx acc
    cdef double total = 0.0
    cdef cplx[::1] fc = np.conj(np.asarray(f))
    for h in range(n):
        acc = 0
        y = h
        for x in range(n):
            acc = acc + f[y] * fc[x]
            y += 1
            if y == n:
                y = 0
        total += acc.real * acc.real + acc.imag * acc.imag
    return total / (<double>n * n * n)


def lambda_dense(const cplx[:, ::1] F):
    cdef Py_ssize_t k = F.shape[0], n = F.shape[1], r, x, j, idx
    cdef cplx total = 0, prod
    for r in range(n):
        for x in range(n):
            prod = F[0, x]
            idx = x
            for j in range(1, k):
                idx += r
                if idx >= n:
                    idx -= n
                prod = prod * F[j, idx]
            total = total + prod
    return complex(total / (<double>n * n))


def lambda_sparse(const cplx[:, ::1] F, const i64[::1] support):
    cdef Py_ssize_t k = F.shape[0], n = F.shape[1], r, a, j, idx, x
    cdef Py_ssize_t s = support.shape[0]
    cdef cplx total = 0, prod
    for a in range(s):
        x = support[a]
        for r in range(n):
            prod = F[0, x]
            idx = x
            for j in range(1, k):
                idx += r
                if idx >= n:
                    idx -= n
                prod = prod * F[j, idx]
            total = total + prod
    return complex(total / (<double>n * n))


def progression_sum(const double[::1] table, const i64[::1] support, i64 N, int k):
    """sum over 1 <= n, r <= N of prod_j table[n + j r], divided by N^2.

    ``support`` must be sorted and contain every index where table is nonzero
    up to 2N; ``table`` must have length > k N.
    """
    cdef Py_ssize_t s = support.shape[0], a, b
    cdef i64 n, m, r, idx
    cdef int j
    cdef double total = 0.0, prod, wn
    for a in range(s):
        n = support[a]
        if n < 1:
            continue
        if n > N:
            break
        wn = table[n]
        b = a + 1
        while b < s and support[b] <= n + N:
            m = support[b]
            r = m - n
            prod = wn * table[m]
            idx = m
            for j in range(2, k):
                idx += r
                prod *= table[idx]
                if prod == 0.0:
                    break
            total += prod
            b += 1
    return total / (<double>N * N)


def dual_function(const cplx[::1] f):
    cdef Py_ssize_t n = f.shape[0], b, c, y, x, yb, yc, ybc
    cdef cplx[::1] fc = np.conj(np.asarray(f))
    cdef cplx[:, ::1] M = np.zeros((n, n), dtype=np.complex128)
    cdef cplx[::1] out = np.zeros(n, dtype=np.complex128)
    cdef cplx acc
    for b in range(n):
        for c in range(n):
            acc = 0
            for y in range(n):
                yb = y + b
                if yb >= n:
                    yb -= n
                yc = y + c
                if yc >= n:
                    yc -= n
                ybc = yb + c
                if ybc >= n:
                    ybc -= n
                acc = acc + f[y] * fc[yb] * fc[yc] * f[ybc]
            M[b, c] = acc / n
    for x in range(n):
        acc = 0
        for b in range(n):
            yb = x + b
            if yb >= n:
                yb -= n
            for c in range(n):
                yc = x + c
                if yc >= n:
                    yc -= n
                ybc = yb + c
                if ybc >= n:
                    ybc -= n
                acc = acc + M[b, c] * f[yb] * f[yc] * fc[ybc]
        out[x] = acc / (<double>n * n)
    return np.asarray(out)
