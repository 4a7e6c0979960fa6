"""Sieve tables, partially sifted sets, Goldston-Yildirim weights and the W-trick."""

from __future__ import annotations

import math
import os
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import budgets as _budgets
from .errors import InputError
from .zmod import CyclicFn, phase

EULER_GAMMA = 0.5772156649015329

CACHE_MAGIC = b"GLSIEVE\x00"
CACHE_VERSION = 1
CACHE_ENV = "GOWERSLAB_CACHE_DIR"


@dataclass(frozen=True, eq=False)
class SieveTables:
    """Exact arithmetic tables on [0, bound]; index 0 is a placeholder."""

    bound: int
    is_prime: np.ndarray = field(repr=False)
    mangoldt: np.ndarray = field(repr=False)
    moebius: np.ndarray = field(repr=False)

    def __post_init__(self):
        for arr in (self.is_prime, self.mangoldt, self.moebius):
            if arr.shape != (self.bound + 1,):
                raise InputError("table length must be bound + 1")
            arr.setflags(write=False)

    def primes(self, upto: int | None = None) -> np.ndarray:
        upto = self.bound if upto is None else upto
        return np.flatnonzero(self.is_prime[: upto + 1])

    def psi(self, n: int) -> float:
        """Chebyshev psi(n) = sum_{m <= n} Lambda(m)."""
        return float(math.fsum(self.mangoldt[: n + 1]))

    def to_bytes(self) -> bytes:
        header = CACHE_MAGIC + struct.pack("<IQ", CACHE_VERSION, self.bound)
        return (
            header
            + np.packbits(self.is_prime.astype(np.uint8)).tobytes()
            + self.mangoldt.astype("<f8").tobytes()
            + self.moebius.astype(np.int8).tobytes()
        )

    @classmethod
    def from_bytes(cls, data: bytes) -> "SieveTables":
        h = len(CACHE_MAGIC)
        if data[:h] != CACHE_MAGIC:
            raise InputError("not a sieve cache file")
        version, bound = struct.unpack_from("<IQ", data, h)
        if version != CACHE_VERSION:
            raise InputError(f"unsupported sieve cache version {version}")
        off = h + 12
        nbits = (bound + 1 + 7) // 8
        expected = off + nbits + 8 * (bound + 1) + (bound + 1)
        if len(data) != expected:
            raise InputError("truncated sieve cache file")
        bits = np.unpackbits(np.frombuffer(data, np.uint8, nbits, off))[: bound + 1].astype(bool)
        off += nbits
        mang = np.frombuffer(data, "<f8", bound + 1, off).astype(np.float64)
        off += 8 * (bound + 1)
        mu = np.frombuffer(data, np.int8, bound + 1, off).copy()
        return cls(bound, bits, mang, mu)


def _prime_table(n: int) -> np.ndarray:
    is_p = np.ones(n + 1, dtype=bool)
    is_p[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if is_p[p]:
            is_p[p * p :: p] = False
    return is_p


def build_sieve(n_max: int, budgets=None) -> SieveTables:
    """Eratosthenes-style construction of primality, Lambda and mu up to n_max."""
    if n_max < 2:
        raise InputError("sieve bound must be at least 2")
    _budgets.check("sieve_max", n_max, budgets)
    is_p = _prime_table(n_max)
    primes = np.flatnonzero(is_p)

    mang = np.zeros(n_max + 1)
    mang[primes] = np.log(primes)
    mu = np.ones(n_max + 1, dtype=np.int8)
    mu[0] = 0
    # product of the small prime factors (each counted once)
    rad = np.ones(n_max + 1, dtype=np.int64)
    for p in primes[primes <= math.isqrt(n_max)]:
        p = int(p)
        q = p * p
        while q <= n_max:
            mang[q] = math.log(p)
            q *= p
        mu[p::p] *= -1
        rad[p::p] *= p
        mu[p * p :: p * p] = 0
    # at most one prime factor above sqrt(n_max) remains
    n = np.arange(n_max + 1)
    big = (rad < n) & (mu != 0)
    mu[big] *= -1
    return SieveTables(n_max, is_p, mang, mu)


def cache_dir(path: str | os.PathLike | None = None) -> Path:
    if path is not None:
        return Path(path)
    return Path(os.environ.get(CACHE_ENV, Path.home() / ".cache" / "gowerslab"))


def load_sieve(n_max: int, directory: str | os.PathLike | None = None, budgets=None) -> SieveTables:
    """Build tables up to n_max, reusing the on-disk cache keyed by n_max."""
    d = cache_dir(directory)
    fname = d / f"sieve_{n_max}.bin"
    if fname.exists():
        return SieveTables.from_bytes(fname.read_bytes())
    tables = build_sieve(n_max, budgets)
    try:
        d.mkdir(parents=True, exist_ok=True)
        tmp = fname.with_suffix(".tmp")
        tmp.write_bytes(tables.to_bytes())
        tmp.replace(fname)
    except OSError:
        pass  # cache is best-effort
    return tables


def _tables(n: int, tables: SieveTables | None) -> SieveTables:
    if tables is not None and tables.bound >= n:
        return tables
    return build_sieve(max(n, 2))


def pnt_average(n: int, tables: SieveTables | None = None) -> float:
    """(1/N) sum_{1 <= m <= N} Lambda(m)."""
    if n < 1:
        raise InputError("N must be >= 1")
    t = _tables(n, tables)
    return t.psi(n) / n


def sifted_set(n: int, R: int, strict: bool = True, tables: SieveTables | None = None) -> np.ndarray:
    """P_R: integers in (floor(N/2), N] with no prime factor p < R (p <= R if not strict)."""
    if not (2 <= R and R * R <= n):
        raise InputError(f"need 2 <= R <= sqrt(N), got R={R}, N={n}")
    lo = n // 2 + 1
    keep = np.ones(n - lo + 1, dtype=bool)
    t = _tables(R, tables)
    for p in t.primes(R):
        p = int(p)
        if strict and p >= R:
            break
        first = -lo % p
        keep[first::p] = False
    return np.flatnonzero(keep) + lo


def mertens_check(n: int, R: int, strict: bool = True, tables: SieveTables | None = None):
    """(observed |P_R|, predicted (N/2) e^-gamma / log R, ratio)."""
    observed = int(sifted_set(n, R, strict, tables).size)
    predicted = (n / 2) * math.exp(-EULER_GAMMA) / math.log(R)
    return observed, predicted, observed / predicted


@dataclass(frozen=True, eq=False)
class GYWeight:
    R: float
    bound: int
    lambda_R: np.ndarray = field(repr=False)
    nu: np.ndarray = field(repr=False)


def gy_weight(n_max: int, R: float, budgets=None) -> GYWeight:
    """Lambda_R(n) = sum_{d | n, d <= R} mu(d) log(R/d) and nu = Lambda_R^2 / log R."""
    if R < 2:
        raise InputError("R must be at least 2")
    if n_max < 1:
        raise InputError("bound must be >= 1")
    _budgets.check("sieve_max", n_max, budgets)
    dmax = math.floor(R)
    mu = build_sieve(max(dmax, 2)).moebius
    logR = math.log(R)
    lam = np.zeros(n_max + 1)
    for d in range(1, min(dmax, n_max) + 1):
        if mu[d]:
            lam[d::d] += mu[d] * (logR - math.log(d))
    lam[0] = 0.0
    return GYWeight(R, n_max, lam, lam * lam / logR)


def w_trick(w: int, budgets=None, max_residues: int = 10**7):
    """(W, phi(W), coprime residues) with W the product of the primes p <= w.

    Residues are listed only when W <= ``max_residues``.
    """
    if w < 2:
        raise InputError("w must be at least 2")
    primes = np.flatnonzero(_prime_table(int(w)))
    W, phi = 1, 1
    for p in primes:
        W *= int(p)
        phi *= int(p) - 1
        _budgets.check("w_max", W, budgets)
    residues = None
    if W <= max_residues:
        r = np.arange(W)
        residues = r[np.gcd(r, W) == 1]
    return W, phi, residues


def restrict_to_class(f, W: int, b: int, phi_W: int | None = None) -> CyclicFn:
    """m -> (phi(W)/W) f(W m + b) on Z/MZ, M = floor(N/W), for f given on [0, N]."""
    f = np.asarray(f)
    n = f.shape[0] - 1
    if not 0 <= b < W:
        raise InputError("class representative must lie in [0, W)")
    if phi_W is None:
        phi_W = sum(1 for r in range(W) if math.gcd(r, W) == 1)
    M = n // W
    if M < 1:
        raise InputError("N is smaller than W")
    m = np.arange(M)
    return CyclicFn(M, f[W * m + b] * (phi_W / W))


def exp_sum_mangoldt(n: int, xi: int, tables: SieveTables | None = None) -> complex:
    """sum_{m < N} Lambda(m) e_N(-m xi), over the prime-power support."""
    t = _tables(n, tables)
    support = np.flatnonzero(t.mangoldt[:n])
    return complex(np.sum(t.mangoldt[support] * phase(n, -support * (xi % n))))


def classify_arc(n: int, xi: int, Q: int = 20) -> dict:
    """Label xi major if |xi - a N/q| <= Q for some reduced a/q with q <= Q.

    In the circle-method scale alpha = xi/N this is |alpha - a/q| <= Q/N. The
    smallest such q is reported.
    """
    xi %= n
    for q in range(1, Q + 1):
        a = round(xi * q / n)
        if abs(xi * q - a * n) <= Q * q and math.gcd(a, q) == 1:
            return {"arc": "major", "a": a % q if q > 1 else a, "q": q}
    return {"arc": "minor", "a": None, "q": None}


def factorize(n: int, budgets=None) -> dict[int, int]:
    """Trial-division factorization within the ``factor_max`` budget."""
    if n < 1:
        raise InputError("can only factor positive integers")
    _budgets.check("factor_max", n, budgets)
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out
