"""Singular-series constants as truncated Euler products of exact local factors.

Each local factor is a ratio of point counts over Z/pZ, kept as a ``Fraction``.
Products are accumulated as compensated sums of logarithms, and every
truncated product carries a rigorous bound on |log(true / truncated)|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InputError
from .primes import _prime_table, factorize

# below this the local counts come from full p^2 enumeration
ENUM_LIMIT = 200

# pi(x) < ROSSER_SCHOENFELD * x / log x for x > 1
ROSSER_SCHOENFELD = 1.25506


@dataclass(frozen=True)
class EulerProductResult:
    name: str
    value: float
    truncation_prime: int
    tail_bound: float
    factor_log: list = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "value": self.value,
            "tail_bound": self.tail_bound,
            "truncation_prime": self.truncation_prime,
        }


def _check_prime(p: int) -> None:
    if p < 2 or any(p % d == 0 for d in range(2, math.isqrt(p) + 1)):
        raise InputError(f"{p} is not prime")


def _ap_count_enum(p: int, k: int) -> int:
    """#{(n, r) in (Z/pZ)^2 : n + j r is a unit for all 0 <= j < k}."""
    n = np.arange(p)[:, None]
    r = np.arange(p)[None, :]
    ok = np.ones((p, p), dtype=bool)
    for j in range(k):
        ok &= (n + j * r) % p != 0
    return int(ok.sum())


def _ap_count_orbit(p: int, k: int) -> int:
    # r = 0 leaves p - 1 units; for r != 0, n/r must avoid the residues -j
    forbidden = len({j % p for j in range(k)})
    return (p - 1) + (p - 1) * (p - forbidden)


def ap_count(p: int, k: int, enumerate_all: bool | None = None) -> int:
    if enumerate_all is None:
        enumerate_all = p < ENUM_LIMIT
    return _ap_count_enum(p, k) if enumerate_all else _ap_count_orbit(p, k)


def local_factor_ap(p: int, k: int, enumerate_all: bool | None = None) -> Fraction:
    """P(n, ..., n+(k-1)r all coprime to p) / prod_j P(n + j r coprime to p)."""
    _check_prime(p)
    if k < 1:
        raise InputError("k must be >= 1")
    count = ap_count(p, k, enumerate_all)
    return Fraction(count * p**k, p * p * (p - 1) ** k)


def _g3_count_enum(p: int, N: int) -> int:
    """#{(n1, n2, n3) units mod p : n1 + n2 + n3 = N mod p}."""
    n1 = np.arange(1, p)[:, None]
    n2 = np.arange(1, p)[None, :]
    return int(np.count_nonzero((N - n1 - n2) % p != 0))


def _g3_count_closed(p: int, N: int) -> int:
    if N % p == 0:
        return (p - 1) * (p - 2)
    return (p - 1) ** 2 - (p - 2)


def local_factor_g3(p: int, N: int, enumerate_all: bool | None = None) -> Fraction:
    """Density of unit triples summing to N mod p, relative to independent units."""
    _check_prime(p)
    if enumerate_all is None:
        enumerate_all = p < ENUM_LIMIT
    count = _g3_count_enum(p, N) if enumerate_all else _g3_count_closed(p, N)
    return Fraction(count * p, (p - 1) ** 3)


def _log(fr: Fraction) -> float:
    return math.log(fr.numerator) - math.log(fr.denominator)


def prime_sq_tail(P: float) -> float:
    """Upper bound for sum_{p > P} 1/p^2 by partial summation against pi(x)."""
    return 2.0 * ROSSER_SCHOENFELD / (P * math.log(P))


def ap_tail_bound(m: int, P: int) -> float:
    """Bound on sum_{p > P} |log(1 - m/p) - m log(1 - 1/p)|, valid for P >= 2m.

    Expanding, the summand is -sum_{j>=2} (m^j - m) x^j / j with x = 1/p, which is
    at most (m(m-1)/2 + m^3 x / (3(1 - m x))) x^2 in absolute value.
    """
    if P < 2 * m:
        raise InputError("tail bound needs P >= 2m")
    x = 1.0 / P
    return (m * (m - 1) / 2 + m**3 * x / (3 * (1 - m * x))) * prime_sq_tail(P)


def _euler(name, factors, P, tail, keep_factors) -> EulerProductResult:
    if any(f == 0 for _, f in factors):
        return EulerProductResult(name, 0.0, P, 0.0, factors if keep_factors else None)
    logs = [_log(f) for _, f in factors]
    value = math.exp(math.fsum(logs))
    return EulerProductResult(name, value, P, tail, factors if keep_factors else None)


def constant_C_k(k: int, P: int = 10**6, keep_factors: bool = False) -> EulerProductResult:
    """prod_p local_factor_ap(p, k), truncated at P with a rigorous tail bound."""
    if k < 3:
        raise InputError("k must be >= 3")
    if P < k:
        raise InputError("need P >= k")
    m = k - 1
    top = max(P, 2 * m)  # primes in (P, 2m] are included exactly
    primes = np.flatnonzero(_prime_table(top))
    factors = [(int(p), local_factor_ap(int(p), k)) for p in primes]
    return _euler(f"C_{k}", factors, P, ap_tail_bound(m, top), keep_factors)


def constant_B2(P: int = 10**6, keep_factors: bool = False) -> EulerProductResult:
    """2 prod_{3 <= p <= P} p(p-2)/(p-1)^2."""
    if P < 3:
        raise InputError("need P >= 3")
    top = max(P, 4)
    primes = np.flatnonzero(_prime_table(top))
    factors = [(2, Fraction(2))] + [(int(p), Fraction(int(p) * (int(p) - 2), (int(p) - 1) ** 2)) for p in primes[1:]]
    return _euler("B_2", factors, P, ap_tail_bound(2, top), keep_factors)


def constant_G2(N: int, P: int = 10**6, budgets=None) -> EulerProductResult:
    """B_2 prod_{p | N, p >= 3} (p-1)/(p-2) for even N; 0 for odd N."""
    if N < 1:
        raise InputError("N must be positive")
    if N % 2:
        return EulerProductResult("G_2", 0.0, P, 0.0)
    b2 = constant_B2(P)
    corr = 1.0
    for p in factorize(N, budgets):
        if p >= 3:
            corr *= (p - 1) / (p - 2)
    return EulerProductResult("G_2", b2.value * corr, P, b2.tail_bound)


def constant_G3(N: int, P: int = 10**6, budgets=None, keep_factors: bool = False) -> EulerProductResult:
    """prod_p local_factor_g3(p, N); zero for even N because of p = 2.

    Odd primes dividing N contribute 1 - 1/(p-1)^2 and are all included exactly,
    the remaining p > P contribute 1 + 1/(p-1)^3, whose logs sum to at most
    sum_{m >= P} 1/m^3 <= 1/(2(P-1)^2).
    """
    if N < 1:
        raise InputError("N must be positive")
    if P < 3:
        raise InputError("need P >= 3")
    primes = [int(p) for p in np.flatnonzero(_prime_table(P))]
    extra = [p for p in factorize(N, budgets) if p > P]
    factors = [(p, local_factor_g3(p, N)) for p in primes + sorted(extra)]
    return _euler("G_3", factors, P, 1.0 / (2 * (P - 1) ** 2), keep_factors)
