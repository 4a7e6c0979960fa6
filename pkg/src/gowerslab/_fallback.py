"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``."""

from __future__ import annotations

import numpy as np

_CHUNK = 256


def _shift_matrix(n: int, rows: np.ndarray) -> np.ndarray:
    return (rows[:, None] + np.arange(n)[None, :]) % n


def autocorr_energy(f: np.ndarray) -> float:
    n = f.shape[0]
    fc = np.conj(f)
    total = 0.0
    for start in range(0, n, _CHUNK):
        hs = np.arange(start, min(start + _CHUNK, n))
        acc = f[_shift_matrix(n, hs)] @ fc
        total += float(np.sum(acc.real**2 + acc.imag**2))
    return total / float(n) ** 3


def lambda_dense(F: np.ndarray) -> complex:
    k, n = F.shape
    xs = np.arange(n)
    total = 0j
    for r in range(n):
        prod = F[0].copy()
        for j in range(1, k):
            prod *= F[j, (xs + j * r) % n]
        total += prod.sum()
    return complex(total / float(n) ** 2)


def lambda_sparse(F: np.ndarray, support: np.ndarray) -> complex:
    k, n = F.shape
    rs = np.arange(n)
    total = 0j
    for x in support:
        prod = np.full(n, F[0, x], dtype=np.complex128)
        for j in range(1, k):
            prod *= F[j, (x + j * rs) % n]
        total += prod.sum()
    return complex(total / float(n) ** 2)


def progression_sum(table: np.ndarray, support: np.ndarray, N: int, k: int) -> float:
    total = 0.0
    head = support[(support >= 1) & (support <= N)]
    for n in head:
        lo = np.searchsorted(support, n + 1)
        hi = np.searchsorted(support, n + N, side="right")
        m = support[lo:hi]
        prod = table[m] * table[n]
        r = m - n
        for j in range(2, k):
            prod = prod * table[n + j * r]
        total += float(prod.sum())
    return total / float(N) ** 2


def dual_function(f: np.ndarray) -> np.ndarray:
    n = f.shape[0]
    fc = np.conj(f)
    idx = np.arange(n)
    plus = (idx[:, None] + idx[None, :]) % n
    M = np.zeros((n, n), dtype=np.complex128)
    for y in range(n):
        M += f[y] * np.outer(fc[(y + idx) % n], fc[(y + idx) % n]) * f[(y + plus) % n]
    M /= n
    out = np.empty(n, dtype=np.complex128)
    for x in range(n):
        sh = (x + idx) % n
        out[x] = np.sum(M * np.outer(f[sh], f[sh]) * fc[(x + plus) % n])
    return out / float(n) ** 2
