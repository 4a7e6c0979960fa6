"""Progression-counting forms Lambda_k and exact AP counting in integer sets."""

from __future__ import annotations

import json
from collections.abc import Iterable, Sequence
from dataclasses import InitVar, asdict, dataclass

import numpy as np

from . import budgets as _budgets
from . import kernels
from .errors import InputError, InvariantViolation
from .zmod import CyclicFn, dft, lp_norm, spectral_norm

SPARSE_FRACTION = 0.25


def lambda3_spectral(f: CyclicFn, g: CyclicFn, h: CyclicFn) -> complex:
    """sum_xi fhat(xi) ghat(-2 xi) hhat(xi)."""
    n = f.modulus
    xi = np.arange(n)
    fh, gh, hh = dft(f).coeffs, dft(g).coeffs, dft(h).coeffs
    return complex(np.sum(fh * gh[(-2 * xi) % n] * hh))


def lambda_k(fs: Sequence[CyclicFn], path: str = "auto", budgets=None) -> complex:
    """E_{x,r} prod_j f_j(x + j r) over Z/NZ.

    ``path`` is one of ``auto``, ``spectral`` (k = 3 only), ``dense`` or ``sparse``.
    The sparse path iterates x over the support of ``fs[0]`` only.
    """
    k = len(fs)
    if k < 3:
        raise InputError(f"Lambda_k needs k >= 3 functions, got {k}")
    n = fs[0].modulus
    if any(f.modulus != n for f in fs):
        raise InputError("modulus mismatch")
    support = np.flatnonzero(fs[0].values)
    if path == "auto":
        if k == 3:
            path = "spectral"
        elif support.size <= SPARSE_FRACTION * n:
            path = "sparse"
        else:
            path = "dense"
    if path == "spectral":
        if k != 3:
            raise InputError("spectral path only exists for k = 3")
        return lambda3_spectral(*fs)
    F = np.stack([f.values for f in fs])
    if path == "dense":
        _budgets.check("lambda_pairs", n * n, budgets)
        return kernels.lambda_dense(F)
    if path == "sparse":
        _budgets.check("lambda_pairs", n * support.size, budgets)
        return kernels.lambda_sparse(F, support)
    raise InputError(f"unknown path {path!r}")


def splitting_check(f: CyclicFn):
    """Compare Lambda_3(f,f,f) with Lambda_3(g,g,g) for g = E(f), b = f - E(f).

    Returns (deviation, bound) with bound = 7 * delta * ||bhat||_inf. Each of the
    seven cross terms contains a b-slot; moving that slot's l^inf norm out and
    applying Cauchy-Schwarz plus Plancherel to the other two slots bounds it by
    ||bhat||_inf * max(||g||_2, ||b||_2)^2 (N odd, so xi -> -2 xi is a bijection).
    For f in [0, 1] with delta = E f, ||g||_2^2 = delta^2 and ||b||_2^2 <= delta,
    so the explicit constant is 1.
    """
    n = f.modulus
    if n % 2 == 0:
        raise InputError("splitting bound needs odd N")
    v = f.values
    if np.any(np.abs(v.imag) > 1e-12) or v.real.min() < -1e-12 or v.real.max() > 1 + 1e-12:
        raise InputError("f must take values in [0, 1]")
    delta = float(np.mean(v.real))
    g = CyclicFn.constant(n, delta)
    b = f - g
    dev = abs(lambda3_spectral(f, f, f) - lambda3_spectral(g, g, g))
    return float(dev), 7.0 * delta * spectral_norm(dft(b), np.inf)


def young_bound(f: CyclicFn, g: CyclicFn, h: CyclicFn) -> tuple[float, float, float]:
    """(|Lambda_3|, ||f||_2 ||g||_2 ||hhat||_inf, ||f||_2 ||ghat||_4 ||hhat||_4)."""
    val = abs(lambda3_spectral(f, g, h))
    gh, hh = dft(g), dft(h)
    b_inf = lp_norm(f, 2) * lp_norm(g, 2) * spectral_norm(hh, np.inf)
    b_4 = lp_norm(f, 2) * spectral_norm(gh, 4) * spectral_norm(hh, 4)
    return float(val), float(b_inf), float(b_4)


@dataclass(frozen=True)
class APReport:
    k: int
    count_nontrivial: int
    count_trivial: int
    witness: tuple[int, int] | None
    normalization: int
    r_positive: bool = True
    members: InitVar[Iterable[int] | None] = None

    def __post_init__(self, members):
        if self.witness is not None and members is not None:
            s = set(members)
            n, r = self.witness
            if r <= 0 or any(n + j * r not in s for j in range(self.k)):
                raise InvariantViolation(f"witness {self.witness} is not a {self.k}-AP in the set")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["witness"] = list(self.witness) if self.witness else None
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _as_table(A: Iterable[int], N: int | None) -> tuple[np.ndarray, np.ndarray, int]:
    elems = np.unique(np.fromiter((int(a) for a in A), dtype=np.int64))
    if N is None:
        N = int(elems[-1]) if elems.size else 0
    if elems.size and (elems[0] < 1 or elems[-1] > N):
        raise InputError(f"elements must lie in [1, {N}]")
    table = np.zeros(N + 1, dtype=bool)
    table[elems] = True
    return elems, table, N


def _aps_from(n: int, table: np.ndarray, k: int) -> np.ndarray:
    """All r > 0 with n, n+r, ..., n+(k-1)r in the table."""
    N = table.shape[0] - 1
    rmax = (N - n) // (k - 1)
    if rmax < 1:
        return np.empty(0, dtype=np.int64)
    r = np.arange(1, rmax + 1)
    ok = np.ones(rmax, dtype=bool)
    for j in range(1, k):
        ok &= table[n + j * r]
    return r[ok]


def count_aps(A: Iterable[int], k: int = 3, N: int | None = None, distinct_r_positive: bool = True) -> APReport:
    """Exact count of k-APs inside A as a subset of the integers (no wraparound)."""
    if k < 3:
        raise InputError("k must be >= 3")
    elems, table, N = _as_table(A, N)
    count = 0
    witness = None
    for n in elems:
        rs = _aps_from(int(n), table, k)
        if rs.size and witness is None:
            witness = (int(n), int(rs[0]))
        count += int(rs.size)
    if not distinct_r_positive:
        count *= 2
    return APReport(
        k=k,
        count_nontrivial=count,
        count_trivial=int(elems.size),
        witness=witness,
        normalization=N * N,
        r_positive=distinct_r_positive,
        members=elems.tolist(),
    )


def find_ap(A: Iterable[int], k: int = 3, N: int | None = None) -> tuple[int, int] | None:
    """First k-AP (n, r), r > 0, in lexicographic (n, r) order, or None."""
    elems, table, _ = _as_table(A, N)
    for n in elems:
        rs = _aps_from(int(n), table, k)
        if rs.size:
            r = int(rs[0])
            if not all(table[n + j * r] for j in range(k)):
                raise InvariantViolation("witness failed re-verification")
            return int(n), r
    return None


def varnavides_statistic(A: Iterable[int], N: int, M: int, k: int = 3) -> float:
    """P_{(a,b)}( density of A on {a+b, ..., a+Mb} >= delta/2 ), delta = |A|/N.

    Progressions are counted with multiplicity (b = 0 included), exactly as in
    the covering argument; enumeration over all N^2 pairs.
    """
    from .gowers import _is_prime

    if not _is_prime(N):
        raise InputError(f"N must be prime, got {N}")
    if not 1 <= M <= N:
        raise InputError("need 1 <= M <= N")
    ind = np.zeros(N, dtype=np.int64)
    for a in A:
        ind[int(a) % N] = 1
    delta = ind.sum() / N
    if delta == 0:
        return 0.0
    a = np.arange(N)
    i = np.arange(1, M + 1)
    hits = 0
    for b in range(N):
        counts = ind[(a[:, None] + i[None, :] * b) % N].sum(axis=1)
        # counts/M >= delta/2, in integers
        hits += int(np.count_nonzero(2 * N * counts >= M * int(ind.sum())))
    return hits / (N * N)


def cyclic_lift_check(A: Iterable[int], N: int, p: int) -> tuple[int, int]:
    """Lift every cyclic 3-AP of A inside Z/pZ (r != 0) back to the integers.

    Requires p > 2N. Returns (number of cyclic witnesses, number that lift to a
    genuine integer 3-AP with r' in (-N, N)); the two agree when p > 2N.
    """
    if p <= 2 * N:
        raise InputError("need p > 2N")
    elems, table, N = _as_table(A, N)
    cyc = np.zeros(p, dtype=bool)
    cyc[elems % p] = True
    found = lifted = 0
    for n in elems:
        r = np.arange(1, p)
        ok = cyc[(n + r) % p] & cyc[(n + 2 * r) % p]
        for rr in r[ok]:
            found += 1
            rp = int(rr) if rr < p / 2 else int(rr) - p
            pts = [int(n), int(n) + rp, int(n) + 2 * rp]
            if all(1 <= q <= N and table[q] for q in pts):
                lifted += 1
    return found, lifted
