"""Gowers box inner products and norms, U^d norms and the dual function.

Box norms are evaluated with ``numpy.einsum`` over the 2^d cube vertices;
U^d norms use the recursion

    ||f||_{U^1} = |E f|,   ||f||_{U^{d+1}}^{2^{d+1}} = E_h ||f(.+h) conj f||_{U^d}^{2^d},

bottoming out in a direct autocorrelation kernel (no Fourier transform),
so the U^2 = l^4 identity is a genuine check rather than a definition.
"""

from __future__ import annotations

import itertools
import string
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from . import budgets as _budgets
from . import kernels
from .ap_forms import lambda_k
from .errors import InputError, InvariantViolation
from .zmod import CyclicFn, inner

ROUNDOFF = 1e-9


@dataclass(frozen=True, eq=False)
class BoxKernel:
    """A kernel K on A_1 x ... x A_d stored as a dense d-dimensional array."""

    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=np.complex128, copy=True)
        if v.ndim < 1 or v.size == 0:
            raise InputError("kernel must have d >= 1 non-empty axes")
        if not np.all(np.isfinite(v)):
            raise InputError("kernel entries must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def dims(self) -> int:
        return self.values.ndim

    @property
    def sizes(self) -> tuple[int, ...]:
        return self.values.shape

    def __add__(self, other: "BoxKernel") -> "BoxKernel":
        return BoxKernel(self.values + other.values)

    def scale(self, c) -> "BoxKernel":
        return BoxKernel(self.values * c)


def cube_vertices(d: int) -> list[tuple[int, ...]]:
    """Vertices of {0,1}^d in the order kernels are passed to the inner product."""
    return list(itertools.product((0, 1), repeat=d))


def _clamp_power(value: complex, scale: float, what: str) -> float:
    re = float(np.real(value))
    if abs(np.imag(value)) > ROUNDOFF * max(scale, 1.0):
        raise InvariantViolation(f"{what}: imaginary part {np.imag(value):.3e} on a real quantity")
    if re < 0.0:
        if re >= -ROUNDOFF * max(scale, 1.0):
            return 0.0
        raise InvariantViolation(f"{what}: negative value {re:.3e} for a non-negative power")
    return re


def gowers_inner_product(kernels_: Sequence[BoxKernel] | Mapping, budgets=None) -> complex:
    """<(K^eps)_eps>_{box^d}; ``kernels_`` is ordered as ``cube_vertices(d)`` or keyed by eps."""
    if isinstance(kernels_, Mapping):
        d = len(next(iter(kernels_)))
        ks = [kernels_[eps] for eps in cube_vertices(d)]
    else:
        ks = list(kernels_)
        d = ks[0].dims if ks else 0
    if d < 1 or len(ks) != 2**d:
        raise InputError(f"need 2^d kernels, got {len(ks)}")
    shape = ks[0].sizes
    if any(k.sizes != shape for k in ks):
        raise InputError("all kernels must share dims and sizes")
    total = int(np.prod(shape))
    _budgets.check("box_pairs", total * total, budgets)

    lo, hi = string.ascii_lowercase, string.ascii_uppercase
    terms, operands = [], []
    for eps, k in zip(cube_vertices(d), ks):
        terms.append("".join(hi[j] if e else lo[j] for j, e in enumerate(eps)))
        operands.append(np.conj(k.values) if sum(eps) % 2 else k.values)
    expr = ",".join(terms) + "->"
    s = np.einsum(expr, *operands, optimize="greedy")
    return complex(s / float(total) ** 2)


def box_norm(K: BoxKernel, budgets=None) -> float:
    d = K.dims
    val = gowers_inner_product([K] * 2**d, budgets)
    scale = float(np.max(np.abs(K.values))) ** (2**d)
    return _clamp_power(val, scale, "box norm") ** (1.0 / 2**d)


def vdc_bound_check(K: BoxKernel, factors: Sequence, tol: float = 1e-12, budgets=None):
    """Both sides of |E(K prod F_i)| <= ||K||_box, with F_i independent of coordinate i."""
    d = K.dims
    if len(factors) != d:
        raise InputError(f"need {d} factor functions, got {len(factors)}")
    prod = K.values.copy()
    for i, F in enumerate(factors):
        F = np.broadcast_to(np.asarray(F, dtype=np.complex128), K.sizes)
        if np.max(np.abs(F)) > 1.0 + tol:
            raise InputError(f"factor {i} is not bounded by 1")
        base = np.take(F, [0], axis=i)
        if np.max(np.abs(F - base)) > tol:
            raise InputError(f"factor {i} depends on coordinate {i}")
        prod = prod * F
    lhs = float(abs(np.mean(prod)))
    return lhs, box_norm(K, budgets)


_U_BUDGET = {2: "u2_max_n", 3: "u3_max_n", 4: "u4_max_n"}


def _u_power(v: np.ndarray, d: int) -> float:
    if d == 1:
        return float(abs(np.mean(v)) ** 2)
    if d == 2:
        return kernels.autocorr_energy(v)
    n = v.shape[0]
    vc = np.conj(v)
    acc = 0.0
    for h in range(n):
        acc += _u_power(np.roll(v, -h) * vc, d - 1)
    return acc / n


def u_norm_power(f: CyclicFn, d: int, budgets=None) -> float:
    """||f||_{U^d}^{2^d} by the recursive formula."""
    if d not in (1, 2, 3, 4):
        raise InputError(f"U^d supported for d in 1..4, got {d}")
    if d >= 2:
        _budgets.check(_U_BUDGET[d], f.modulus, budgets)
    val = _u_power(f.values, d)
    scale = float(np.max(np.abs(f.values))) ** (2**d) if f.modulus else 1.0
    return _clamp_power(val, scale, f"U^{d} power")


def u_norm(f: CyclicFn, d: int, budgets=None) -> float:
    return u_norm_power(f, d, budgets) ** (1.0 / 2**d)


def u_norm_full(f: CyclicFn, d: int, max_points: int = 20_000_000) -> float:
    """||f||_{U^d} from the (d+1)-variable cube average, without recursion.

    Cost O(N^(d+1)); used as an independent check of ``u_norm``.
    """
    n = f.modulus
    if n ** (d + 1) > max_points:
        raise _budgets.BudgetExceeded(f"N^(d+1) = {n ** (d + 1)} exceeds {max_points}")
    axes = np.ix_(*([np.arange(n)] * (d + 1)))
    x, hs = axes[0], axes[1:]
    acc = np.ones([n] * (d + 1), dtype=np.complex128)
    for eps in cube_vertices(d):
        arg = x + sum(h for h, e in zip(hs, eps) if e)
        vals = f.values[arg % n]
        acc = acc * (np.conj(vals) if sum(eps) % 2 else vals)
    scale = float(np.max(np.abs(f.values))) ** (2**d)
    return _clamp_power(np.mean(acc), scale, f"U^{d} full average") ** (1.0 / 2**d)


def dual_function(f: CyclicFn, budgets=None) -> CyclicFn:
    """Df(x) = E_{a,b,c} of the seven shifted copies of f around the cube at x."""
    _budgets.check("dual_max_n", f.modulus, budgets)
    return CyclicFn(f.modulus, kernels.dual_function(f.values))


def dual_pairing(f: CyclicFn, g: CyclicFn, budgets=None) -> complex:
    """<f, Dg>; equals ||f||_{U^3}^8 when g = f."""
    return inner(f, dual_function(g, budgets))


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


def lambda_k_reparametrized(fs: Sequence[CyclicFn], j: int, max_points: int = 4_000_000) -> complex:
    """Lambda_k via the substitution that frees every factor but the j-th of one variable.

    With variables x_i (i != j), S = sum x_i and L = sum x_i / (j - i) mod N, the
    points S - (j - i) L form a k-AP whose j-th term is S and whose i-th term does
    not involve x_i. Inverses are exact modular inverses, so N must be prime > k.
    """
    k = len(fs)
    n = fs[0].modulus
    if not (_is_prime(n) and n > k):
        raise InputError(f"modulus must be a prime larger than k={k}, got {n}")
    if n ** (k - 1) > max_points:
        raise _budgets.BudgetExceeded(f"N^(k-1) = {n ** (k - 1)} exceeds {max_points}")
    others = [i for i in range(k) if i != j]
    grids = np.ix_(*([np.arange(n, dtype=np.int64)] * (k - 1)))
    S = sum(grids) % n
    L = sum(g * pow(j - i, -1, n) for g, i in zip(grids, others)) % n
    acc = np.ones([n] * (k - 1), dtype=np.complex128)
    for i, f in enumerate(fs):
        acc = acc * f.values[(S - (j - i) * L) % n]
    return complex(np.mean(acc))


def gvn_bound_check(fs: Sequence[CyclicFn], budgets=None, cross_check: bool = True):
    """Return (|Lambda_k(fs)|, min_j ||f_j||_{U^{k-1}}) for k = len(fs) in {3, 4, 5}."""
    k = len(fs)
    if k not in (3, 4, 5):
        raise InputError(f"k must be 3, 4 or 5, got {k}")
    n = fs[0].modulus
    if any(f.modulus != n for f in fs):
        raise InputError("modulus mismatch")
    if not (_is_prime(n) and n > k):
        raise InputError(f"N must be a prime larger than k={k}, got {n}")
    if not all(f.is_bounded() for f in fs):
        raise InputError("all functions must be bounded by 1")
    norms = [u_norm(f, k - 1, budgets) for f in fs]
    value = lambda_k(fs, budgets=budgets)
    if cross_check and n ** (k - 1) <= 4_000_000:
        jmin = int(np.argmin(norms))
        alt = lambda_k_reparametrized(fs, jmin)
        if abs(alt - value) > 1e-9 * max(1.0, abs(value)):
            raise InvariantViolation(f"reparametrized Lambda_{k} {alt} != {value}")
    return float(abs(value)), float(min(norms))
