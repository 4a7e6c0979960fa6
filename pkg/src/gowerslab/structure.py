"""Bohr partitions, conditional expectation, and the two structural algorithms.

``roth_density_increment_search`` runs the density-increment argument on an
integer set and returns a verified 3-AP together with the recursion trace.
``kvn_decompose`` runs the energy-increment loop and splits f into a Bohr-measurable
part g plus a Fourier-uniform remainder b. The module also holds the finite-field
model problem tools: exact quadratic fitting and the additive-quadruple statistic.
"""

from __future__ import annotations

import json
import math
from collections.abc import Iterable, Sequence
from dataclasses import asdict, dataclass, field

import numpy as np

from . import budgets as _budgets
from .ap_forms import find_ap
from .errors import InputError, InvariantViolation, NoWitnessError
from .gowers import _is_prime
from .zmod import CyclicFn, dft, phase

CELL_DIAMETER = 2.0 * math.sqrt(2.0)

# density-increment constants
UNIFORM_C = 0.01
INCREMENT_C = 0.001
CELL_C = 0.01
FALLBACK_FLOOR = 20


@dataclass(frozen=True)
class Generator:
    xi: int
    eps: float
    alpha: tuple[float, float] = (0.0, 0.0)


@dataclass(frozen=True, eq=False)
class BohrPartition:
    """Atoms of the sigma-algebra generated by square cells of side eps pulled back by e_N(xi x)."""

    modulus: int
    generators: tuple[Generator, ...]
    atom_of: np.ndarray = field(repr=False)
    atom_count: int

    @classmethod
    def from_labels(cls, n: int, labels, generators=()) -> "BohrPartition":
        labels = np.asarray(labels)
        if labels.shape[0] != n:
            raise InputError("one label per residue required")
        _, atom_of = np.unique(labels, axis=0, return_inverse=True) if labels.ndim > 1 else np.unique(
            labels, return_inverse=True
        )
        atom_of = atom_of.reshape(-1).astype(np.int64)
        atom_of.setflags(write=False)
        return cls(n, tuple(generators), atom_of, int(atom_of.max()) + 1 if n else 0)

    @classmethod
    def trivial(cls, n: int) -> "BohrPartition":
        return cls.from_labels(n, np.zeros(n, dtype=np.int64))

    @classmethod
    def discrete(cls, n: int) -> "BohrPartition":
        return cls.from_labels(n, np.arange(n))

    def cells(self) -> np.ndarray:
        """Per-residue cell indices, one (re, im) column pair per generator."""
        return _cells(self.modulus, self.generators)

    def join(self, other: "BohrPartition") -> "BohrPartition":
        if other.modulus != self.modulus:
            raise InputError("modulus mismatch")
        labels = np.stack([self.atom_of, other.atom_of], axis=1)
        return BohrPartition.from_labels(self.modulus, labels, self.generators + other.generators)

    def atom_bound(self) -> int:
        return int(np.prod([(math.ceil(2.0 / g.eps) + 1) ** 2 for g in self.generators])) if self.generators else 1

    def atom_sizes(self) -> np.ndarray:
        return np.bincount(self.atom_of, minlength=self.atom_count)


def _cells(n: int, generators: Sequence[Generator]) -> np.ndarray:
    x = np.arange(n, dtype=np.int64)
    cols = []
    for g in generators:
        z = phase(n, x * (g.xi % n))
        cols.append(np.floor((z.real + 1.0) / g.eps + g.alpha[0]).astype(np.int64))
        cols.append(np.floor((z.imag + 1.0) / g.eps + g.alpha[1]).astype(np.int64))
    if not cols:
        return np.zeros((n, 1), dtype=np.int64)
    return np.stack(cols, axis=1)


def bohr_partition(n: int, generators: Iterable, rng: np.random.Generator | None = None) -> BohrPartition:
    """Partition of Z/NZ by the cells of each generator.

    Generators are ``Generator`` objects or ``(xi, eps)`` / ``(xi, eps, alpha)``
    tuples. Passing ``rng`` replaces every offset by a uniform draw from [0,1)^2.
    """
    if n < 1:
        raise InputError("N must be >= 1")
    gens = []
    for g in generators:
        if not isinstance(g, Generator):
            g = Generator(int(g[0]), float(g[1]), tuple(g[2]) if len(g) > 2 else (0.0, 0.0))
        if not g.eps > 0:
            raise InputError(f"cell side must be positive, got {g.eps}")
        if g.eps > 1:
            raise InputError(f"cell side must be at most 1, got {g.eps}")
        if rng is not None:
            g = Generator(g.xi, g.eps, (float(rng.random()), float(rng.random())))
        gens.append(g)
    return BohrPartition.from_labels(n, _cells(n, gens), gens)


def cond_expect(f: CyclicFn, B: BohrPartition) -> CyclicFn:
    """E(f | B): replace f by its mean over each atom."""
    if f.modulus != B.modulus:
        raise InputError("modulus mismatch")
    sizes = B.atom_sizes()
    re = np.bincount(B.atom_of, weights=f.values.real, minlength=B.atom_count)
    im = np.bincount(B.atom_of, weights=f.values.imag, minlength=B.atom_count)
    means = (re + 1j * im) / sizes
    return CyclicFn(f.modulus, means[B.atom_of])


def energy(f: CyclicFn) -> float:
    return float(np.mean(np.abs(f.values) ** 2))


@dataclass
class TraceStep:
    level: int
    kind: str
    frequency: int | None
    epsilon: float | None
    density_or_energy: float
    atom_count: int
    length: int | None = None
    q: int | None = None
    max_b_hat: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def trace_json(trace: Sequence[TraceStep]) -> str:
    return json.dumps([s.to_dict() for s in trace])


# ---------------------------------------------------------------- Roth search


def next_prime(n: int) -> int:
    n = max(n, 2)
    while not _is_prime(n):
        n += 1
    return n


def dirichlet_denominator(xi: int, p: int, Q: int) -> int:
    """Smallest continued-fraction denominator q <= Q of xi/p with ||q xi/p|| <= 1/Q.

    The last convergent with denominator <= Q always qualifies (Dirichlet).
    """
    Q = max(int(Q), 1)
    num, den = xi % p, p
    k_prev, k_cur = 0, 1
    best = 1
    while k_cur <= Q:
        best = k_cur
        frac = (k_cur * xi) % p
        if min(frac, p - frac) * Q <= p:
            return k_cur
        if num == 0:
            break
        t, num, den = den // num, den % num, num
        k_prev, k_cur = k_cur, t * k_cur + k_prev
    return best


@dataclass
class RothResult:
    witness: tuple[int, int]
    trace: list[TraceStep]

    def to_dict(self) -> dict:
        return {"witness": list(self.witness), "trace": [s.to_dict() for s in self.trace]}


def _verify(witness, members: set, k: int = 3) -> tuple[int, int]:
    n, r = witness
    if r <= 0 or any(n + j * r not in members for j in range(k)):
        raise NoWitnessError(f"candidate {witness} failed membership check")
    return int(n), int(r)


def roth_density_increment_search(
    A: Iterable[int],
    N: int,
    delta_floor: float = 0.0,
    uniform_c: float = UNIFORM_C,
    increment_c: float = INCREMENT_C,
    cell_c: float = CELL_C,
    fallback_floor: int = FALLBACK_FLOOR,
    min_n: int = 3,
) -> RothResult:
    """Locate a 3-AP in A by density increment.

    At each level the current set lives on a progression {a + d i : 1 <= i <= L}
    and is viewed as a subset of [1, L] embedded in Z/pZ for a prime p in (2L, 4L].
    With b = 1_A - delta 1_[1,L]:

    * ``uniform``: ||bhat||_inf <= c delta^2, so Lambda_3 is close to the random
      count and a progression is read off directly;
    * ``increment``: otherwise take xi = argmax |bhat|, a Dirichlet denominator
      q <= sqrt(L) with ||q xi/p|| <= 1/sqrt(L), cut [1, L] into progressions of
      step q along which the character is nearly constant, and recurse on the
      densest piece if it beats delta + c''' delta^2;
    * ``fallback``: below ``fallback_floor`` or when no piece is dense enough,
      search exhaustively (first at the current level, then on all of A).
    """
    elems = sorted({int(a) for a in A})
    if N < min_n:
        raise InputError(f"N must be at least {min_n}")
    if elems and (elems[0] < 1 or elems[-1] > N):
        raise InputError(f"elements must lie in [1, {N}]")
    if len(elems) < delta_floor * N:
        raise InputError(f"density {len(elems) / N:.4f} below floor {delta_floor}")
    members = set(elems)
    trace: list[TraceStep] = []

    a0, d0, L = 0, 1, N  # level set: {a0 + d0 * i : i in [1, L]}
    local = np.array(elems, dtype=np.int64)
    level = 0

    def lift(w):
        n, r = w
        return a0 + d0 * n, d0 * r

    while True:
        delta = local.size / L if L else 0.0
        if L < fallback_floor or local.size < 3:
            trace.append(TraceStep(level, "fallback", None, None, delta, 1, L))
            break
        p = next_prime(2 * L + 1)
        ind = np.zeros(p)
        ind[local] = 1.0
        b = ind.copy()
        b[1 : L + 1] -= delta
        bh = dft(CyclicFn(p, b)).coeffs
        mags = np.abs(bh)
        mags[0] = -1.0
        xi = int(np.argmax(mags))
        top = float(mags[xi])
        eps = cell_c * delta**2
        if top <= uniform_c * delta**2:
            w = find_ap(local.tolist(), 3, L)
            trace.append(TraceStep(level, "uniform", xi, eps, delta, 1, L, max_b_hat=top))
            if w is not None:
                return RothResult(_verify(lift(w), members), trace)
            break
        Q = max(1, math.isqrt(L))
        q = dirichlet_denominator(xi, p, Q)
        M = max(3, L // (q * Q)) if q * Q <= L else max(1, L // q)
        # pieces: residue class s mod q, consecutive runs of length M
        best_den, best_piece = -1.0, None
        mask = np.zeros(L + 1, dtype=bool)
        mask[local] = True
        pieces = 0
        for s in range(1, q + 1):
            idx = np.arange(s, L + 1, q)
            for start in range(0, idx.size - M + 1, M):
                run = idx[start : start + M]
                pieces += 1
                den = float(mask[run].mean())
                if den > best_den:
                    best_den, best_piece = den, run
        trace.append(TraceStep(level, "increment", xi, eps, delta, pieces, L, q=q, max_b_hat=top))
        if best_piece is None or best_den < delta + increment_c * delta**2:
            trace[-1].kind = "fallback"
            break
        # recurse on {a0 + d0 * run[i]}: new progression start and step
        start, step = int(best_piece[0]), q
        sub = mask[best_piece]
        a0, d0 = a0 + d0 * (start - step), d0 * step
        L = best_piece.size
        local = np.flatnonzero(sub) + 1
        level += 1

    w = find_ap(local.tolist(), 3, L) if local.size else None
    if w is not None:
        return RothResult(_verify(lift(w), members), trace)
    w = find_ap(elems, 3, N)
    trace.append(TraceStep(level, "fallback", None, None, len(elems) / N, 1, N))
    if w is None:
        raise NoWitnessError("A contains no 3-term arithmetic progression")
    return RothResult(_verify(w, members), trace)


# ---------------------------------------------------------------- KvN decomposition


@dataclass
class Decomposition:
    g: CyclicFn
    b: CyclicFn
    iterations: list[TraceStep]
    atom_count: int
    threshold_used: float
    status: str
    partition: BohrPartition = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "atom_count": self.atom_count,
            "threshold_used": self.threshold_used,
            "max_b_hat": float(np.max(np.abs(dft(self.b).coeffs))),
            "iterations": [s.to_dict() for s in self.iterations],
        }


def kvn_decompose(
    f: CyclicFn,
    delta: float,
    tau: float,
    atom_budget: int | None = None,
    gain_floor: float | None = None,
    min_eps: float = 1e-12,
) -> Decomposition:
    """Energy-increment decomposition f = g + b with g = E(f | B) and ||bhat||_inf <= tau.

    Each round takes sigma = max |bhat| at xi (smallest xi on ties) and joins the
    Bohr partition of e_N(xi x) with cell side eps = sigma/4, halving eps until the
    energy ||g||^2 rises by at least ``gain_floor`` (default tau^2/4). Once the
    partition makes the character measurable the gain is at least sigma^2, so the
    halving stops. Status is ``budget`` if the next refinement would exceed
    ``atom_budget`` atoms (default N).
    """
    n = f.modulus
    v = f.values
    if np.any(np.abs(v.imag) > 1e-12) or v.real.min() < -1e-12 or v.real.max() > 1 + 1e-12:
        raise InputError("f must take values in [0, 1]")
    if not tau > 0:
        raise InputError("tau must be positive")
    if float(np.mean(v.real)) < delta - 1e-12:
        raise InputError(f"E(f) = {np.mean(v.real):.6f} is below delta = {delta}")
    atom_budget = n if atom_budget is None else int(atom_budget)
    gain_floor = tau * tau / 4 if gain_floor is None else gain_floor

    B = BohrPartition.trivial(n)
    g = cond_expect(f, B)
    e = energy(g)
    trace = [TraceStep(0, "refine", None, None, e, 1, max_b_hat=float(np.max(np.abs(dft(f - g).coeffs))))]
    status = "done"
    level = 0
    while True:
        b = f - g
        bh = np.abs(dft(b).coeffs)
        xi = int(np.argmax(bh))
        sigma = float(bh[xi])
        if sigma <= tau:
            break
        eps = min(1.0, sigma / 4)
        while True:
            B_new = B.join(bohr_partition(n, [(xi, eps)]))
            g_new = cond_expect(f, B_new)
            e_new = energy(g_new)
            if e_new - e >= gain_floor or eps < min_eps:
                break
            eps /= 2
        if e_new - e < gain_floor:
            raise InvariantViolation(f"no energy gain at frequency {xi}")
        if B_new.atom_count > atom_budget:
            status = "budget"
            break
        level += 1
        B, g, e = B_new, g_new, e_new
        trace.append(
            TraceStep(level, "refine", xi, eps, e, B.atom_count, max_b_hat=float(np.max(np.abs(dft(f - g).coeffs))))
        )
    # clip float dust so g stays inside [0, 1]
    gv = np.clip(g.values.real, 0.0, 1.0)
    g = CyclicFn(n, gv)
    return Decomposition(g, f - g, trace, B.atom_count, tau, status, B)


# ---------------------------------------------------------------- model problem


@dataclass(frozen=True)
class QuadFit:
    p: int
    a: int
    b: int
    c: int

    def __call__(self, x: int) -> int:
        return (self.a * x * x + self.b * x + self.c) % self.p


class QuadFitFailure(NoWitnessError):
    def __init__(self, quadruple: tuple[int, int, int, int]):
        super().__init__(f"third difference nonzero at (x, r, s, t) = {quadruple}")
        self.quadruple = quadruple


def phi3_value(phi: Sequence[int], p: int, x: int, r: int, s: int, t: int) -> int:
    """Alternating sum of phi over the cube {x + subsets of (r, s, t)} mod p."""
    tot = 0
    for er in (0, 1):
        for es in (0, 1):
            for et in (0, 1):
                sign = -1 if (er + es + et) % 2 else 1
                tot += sign * int(phi[(x + er * r + es * s + et * t) % p])
    return tot % p


def phi3_exhaustive(phi: Sequence[int], p: int) -> bool:
    """Check the vanishing of all third differences over (Z/pZ)^4."""
    phi = np.asarray(phi, dtype=np.int64) % p
    g = np.arange(p)
    x, r, s, t = np.ix_(g, g, g, g)
    tot = np.zeros((p, p, p, p), dtype=np.int64)
    for er in (0, 1):
        for es in (0, 1):
            for et in (0, 1):
                sign = -1 if (er + es + et) % 2 else 1
                tot = tot + sign * phi[(x + er * r + es * s + et * t) % p]
    return bool(np.all(tot % p == 0))


def fit_quadratic_phase(phi: Sequence[int], p: int) -> QuadFit:
    """Exact a, b, c with phi(x) = a x^2 + b x + c mod p, or QuadFitFailure.

    A function on Z/pZ (p odd) has vanishing third differences everywhere iff its
    step-one second difference is constant, which is an O(p) test.
    """
    if not (_is_prime(p) and p > 3):
        raise InputError(f"p must be a prime > 3, got {p}")
    vals = [int(v) % p for v in phi]
    if len(vals) != p:
        raise InputError(f"need {p} table entries, got {len(vals)}")
    d2 = [(vals[(x + 2) % p] - 2 * vals[(x + 1) % p] + vals[x]) % p for x in range(p)]
    for x in range(p):
        if d2[(x + 1) % p] != d2[x]:
            raise QuadFitFailure((x, 1, 1, 1))
    a = d2[0] * pow(2, -1, p) % p
    c = vals[0]
    b = (vals[1] - a - c) % p
    fit = QuadFit(p, a, b, c)
    if any(fit(x) != vals[x] for x in range(p)):
        raise QuadFitFailure((0, 1, 1, 1))
    return fit


def _partial_map(a, H, p: int) -> tuple[np.ndarray, np.ndarray]:
    mask = np.zeros(p, dtype=bool)
    vals = np.zeros(p, dtype=np.int64)
    if isinstance(a, dict):
        H = a.keys() if H is None else H
        for h in H:
            mask[int(h) % p] = True
            vals[int(h) % p] = int(a[h]) % p
    else:
        arr = np.asarray(a, dtype=np.int64) % p
        if H is None:
            mask[:] = True
        else:
            mask[np.asarray(list(H), dtype=np.int64) % p] = True
        vals = np.where(mask, arr, 0)
    return mask, vals


def additive_quadruple_statistic(a, p: int, H: Iterable[int] | None = None, budgets=None) -> float:
    """P over (h, t, u) of: all of h, h+t, h+u, h+t+u in H and a(h+t+u)-a(h+t)-a(h+u)+a(h) = 0.

    ``a`` is a dict on H or a length-p table (then H defaults to all of Z/pZ).
    """
    if not _is_prime(p):
        raise InputError(f"p must be prime, got {p}")
    _budgets.check("quadruple_max_p", p, budgets)
    mask, vals = _partial_map(a, H, p)
    h = np.arange(p)[:, None]
    u = np.arange(p)[None, :]
    hits = 0
    for t in range(p):
        ok = mask[h] & mask[(h + t) % p] & mask[(h + u) % p] & mask[(h + t + u) % p]
        s = vals[(h + t + u) % p] - vals[(h + t) % p] - vals[(h + u) % p] + vals[h]
        hits += int(np.count_nonzero(ok & (s % p == 0)))
    return hits / p**3


def best_affine_match(a, p: int, H: Iterable[int] | None = None) -> tuple[float, int, int]:
    """max over (alpha, beta) of the fraction of h in H with a(h) = alpha h + beta."""
    mask, vals = _partial_map(a, H, p)
    hs = np.flatnonzero(mask)
    if hs.size == 0:
        return 0.0, 0, 0
    best, arg = -1, (0, 0)
    for alpha in range(p):
        counts = np.bincount((vals[hs] - alpha * hs) % p, minlength=p)
        beta = int(np.argmax(counts))
        if counts[beta] > best:
            best, arg = int(counts[beta]), (alpha, beta)
    return best / hs.size, arg[0], arg[1]


def two_dimensional_example(p: int, alpha: int, beta: int, M: int | None = None) -> tuple[dict, int]:
    """H = {n + 2Mm : 1 <= n, m <= M} with a(n + 2Mm) = alpha n + beta m, M in [sqrt(p)/4, sqrt(p)/2]."""
    if M is None:
        M = math.ceil(math.sqrt(p) / 4)
    if not (math.sqrt(p) / 4 <= M <= math.sqrt(p) / 2):
        raise InputError(f"M = {M} outside [sqrt(p)/4, sqrt(p)/2]")
    a = {}
    for n in range(1, M + 1):
        for m in range(1, M + 1):
            a[(n + 2 * M * m) % p] = (alpha * n + beta * m) % p
    return a, M
