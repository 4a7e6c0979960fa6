"""Functions on Z/NZ: expectation, L^p norms, shifts, characters and the DFT.

Normalization follows the averaged convention throughout:

    fhat(xi) = E_x f(x) e_N(-x xi),      f(x) = sum_xi fhat(xi) e_N(x xi),

so that ||f||_{L^2} (averaged) equals ||fhat||_{l^2} (plain sum).
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import InputError

REL_TOL = 1e-9
ABS_TOL = 1e-12
BOUNDED_SLACK = 1e-12

Number = Union[int, float, complex]


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=np.complex128, copy=True).reshape(-1)
    arr.setflags(write=False)
    return arr


def close(a, b, rel: float = REL_TOL, abs_: float = ABS_TOL) -> bool:
    """Relative comparison with an absolute floor."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    scale = np.maximum(np.abs(a), np.abs(b))
    return bool(np.all(np.abs(a - b) <= np.maximum(rel * scale, abs_)))


@dataclass(frozen=True, eq=False)
class CyclicFn:
    """A complex-valued function on Z/NZ stored as its N values."""

    modulus: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if int(self.modulus) < 1:
            raise InputError(f"modulus must be >= 1, got {self.modulus}")
        vals = _frozen(self.values)
        if vals.shape[0] != self.modulus:
            raise InputError(f"expected {self.modulus} values, got {vals.shape[0]}")
        if not np.all(np.isfinite(vals)):
            raise InputError("values must be finite")
        object.__setattr__(self, "modulus", int(self.modulus))
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_values(cls, values) -> "CyclicFn":
        vals = np.asarray(values)
        return cls(vals.shape[0], vals)

    @classmethod
    def constant(cls, n: int, c: Number = 1.0) -> "CyclicFn":
        return cls(n, np.full(n, c, dtype=np.complex128))

    @classmethod
    def indicator(cls, n: int, elements) -> "CyclicFn":
        vals = np.zeros(n, dtype=np.complex128)
        for e in elements:
            vals[int(e) % n] = 1.0
        return cls(n, vals)

    def __len__(self) -> int:
        return self.modulus

    def __getitem__(self, x: int) -> complex:
        return complex(self.values[x % self.modulus])

    def is_bounded(self, slack: float = BOUNDED_SLACK) -> bool:
        return bool(np.all(np.abs(self.values) <= 1.0 + slack))

    def is_real(self, tol: float = ABS_TOL) -> bool:
        return bool(np.all(np.abs(self.values.imag) <= tol))

    def _other(self, other) -> np.ndarray:
        if isinstance(other, CyclicFn):
            if other.modulus != self.modulus:
                raise InputError(f"modulus mismatch: {self.modulus} vs {other.modulus}")
            return other.values
        return np.complex128(other)

    def __add__(self, other) -> "CyclicFn":
        return CyclicFn(self.modulus, self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other) -> "CyclicFn":
        return CyclicFn(self.modulus, self.values - self._other(other))

    def __rsub__(self, other) -> "CyclicFn":
        return CyclicFn(self.modulus, self._other(other) - self.values)

    def __mul__(self, other) -> "CyclicFn":
        return CyclicFn(self.modulus, self.values * self._other(other))

    __rmul__ = __mul__

    def __neg__(self) -> "CyclicFn":
        return CyclicFn(self.modulus, -self.values)

    def conj(self) -> "CyclicFn":
        return CyclicFn(self.modulus, np.conj(self.values))

    def scale(self, c: Number) -> "CyclicFn":
        return CyclicFn(self.modulus, self.values * c)

    def shift(self, h: int) -> "CyclicFn":
        return shift(self, h)

    def to_json(self) -> dict:
        return {
            "n": self.modulus,
            "re": [float(v) for v in self.values.real],
            "im": [float(v) for v in self.values.imag],
        }

    @classmethod
    def from_json(cls, doc) -> "CyclicFn":
        if isinstance(doc, (str, bytes)):
            doc = json.loads(doc)
        try:
            n = int(doc["n"])
            re = np.asarray(doc["re"], dtype=np.float64)
            im = np.asarray(doc.get("im", [0.0] * n), dtype=np.float64)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed CyclicFn JSON: {exc}") from exc
        if re.shape != (n,) or im.shape != (n,):
            raise InputError("re/im arrays must both have length n")
        return cls(n, re + 1j * im)

    def to_bytes(self) -> bytes:
        """Little-endian u64 N followed by N interleaved (re, im) float64 pairs."""
        return struct.pack("<Q", self.modulus) + self.values.astype("<c16").tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "CyclicFn":
        if len(data) < 8:
            raise InputError("truncated CyclicFn binary")
        (n,) = struct.unpack_from("<Q", data, 0)
        if len(data) != 8 + 16 * n:
            raise InputError(f"binary CyclicFn length {len(data)} does not match N={n}")
        vals = np.frombuffer(data, dtype="<c16", offset=8, count=n)
        return cls(n, vals)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Fourier coefficients fhat(xi), xi = 0..N-1."""

    modulus: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = _frozen(self.coeffs)
        if c.shape[0] != self.modulus:
            raise InputError(f"expected {self.modulus} coefficients, got {c.shape[0]}")
        object.__setattr__(self, "modulus", int(self.modulus))
        object.__setattr__(self, "coeffs", c)

    def __getitem__(self, xi: int) -> complex:
        return complex(self.coeffs[xi % self.modulus])

    def argmax(self, exclude_zero: bool = False) -> int:
        """Frequency of largest |coefficient|, ties broken by smallest xi."""
        mags = np.abs(self.coeffs)
        if exclude_zero and self.modulus > 1:
            mags = mags.copy()
            mags[0] = -1.0
        return int(np.argmax(mags))


def expectation(f: CyclicFn) -> complex:
    return complex(np.mean(f.values))


def inner(f: CyclicFn, g: CyclicFn) -> complex:
    """<f, g> = E(f conj g)."""
    if f.modulus != g.modulus:
        raise InputError("modulus mismatch")
    return complex(np.mean(f.values * np.conj(g.values)))


def phase(n: int, exponents) -> np.ndarray:
    """e_N(m) for integer exponents m, reduced mod N before the float conversion."""
    m = np.mod(np.asarray(exponents, dtype=np.int64), n)
    return np.exp(2j * np.pi * m / n)


def character(n: int, xi: int) -> CyclicFn:
    if not 0 <= xi < n:
        raise InputError(f"frequency {xi} out of range for modulus {n}")
    x = np.arange(n, dtype=np.int64)
    return CyclicFn(n, phase(n, x * xi))


def modulate(f: CyclicFn, xi: int) -> CyclicFn:
    x = np.arange(f.modulus, dtype=np.int64)
    return CyclicFn(f.modulus, f.values * phase(f.modulus, x * (xi % f.modulus)))


def shift(f: CyclicFn, h: int) -> CyclicFn:
    """(T^h f)(x) = f(x + h)."""
    return CyclicFn(f.modulus, np.roll(f.values, -(h % f.modulus)))


def polynomial_phase(n: int, coeffs) -> CyclicFn:
    """x -> e_N(c0 + c1 x + c2 x^2 + ...), evaluated in exact integer arithmetic mod N."""
    x = np.arange(n, dtype=object)
    acc = np.zeros(n, dtype=object)
    for c in reversed(list(coeffs)):
        acc = (acc * x + int(c)) % n
    return CyclicFn(n, phase(n, acc.astype(np.int64)))


def dft(f: CyclicFn) -> Spectrum:
    # numpy's pocketfft handles every length exactly (Bluestein for large primes)
    return Spectrum(f.modulus, np.fft.fft(f.values) / f.modulus)


def idft(s: Spectrum) -> CyclicFn:
    return CyclicFn(s.modulus, np.fft.ifft(s.coeffs) * s.modulus)


_EXPONENTS = (1, 2, 4, np.inf)


def _check_p(p) -> float:
    if p in ("inf", "infinity"):
        p = np.inf
    if p not in _EXPONENTS:
        raise InputError(f"unsupported exponent {p!r}; use 1, 2, 4 or inf")
    return float(p)


def lp_norm(f: CyclicFn, p=2) -> float:
    """Averaged norm E(|f|^p)^(1/p)."""
    p = _check_p(p)
    a = np.abs(f.values)
    if p == np.inf:
        return float(a.max())
    return float(np.mean(a**p) ** (1.0 / p))


def spectral_norm(s: Spectrum, p=2) -> float:
    """Plain-sum norm (sum |fhat|^p)^(1/p)."""
    p = _check_p(p)
    a = np.abs(s.coeffs)
    if p == np.inf:
        return float(a.max())
    return float(np.sum(a**p) ** (1.0 / p))


# Spec-name aliases
norms = lp_norm
spectral_norms = spectral_norm
